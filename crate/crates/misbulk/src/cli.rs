//! Command-line interface: configuration loading, subcommand dispatch and
//! all file output. Floats are written as shortest round-trip decimals, so
//! identical configurations reproduce byte-identical files.
//!
//! Exit codes: 0 success (a detected breakdown still counts as success),
//! 1 domain failure (invalid certificate, no certified amplitude, failed
//! validation, certificate mismatch), 2 usage or configuration errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use crate::certifier::{self, Certificate, CertifySpec};
use crate::config::{parse_config, RunConfig};
use crate::constitutive::{abar_bound, validate_assumptions, ConstitutiveSet, SampleSpec};
use crate::flowline::{self, FlowlineOptions};
use crate::riemann;
use crate::shell::ShellData;
use crate::solver::{self, RunSpec, SolutionRun, VirialContext};
use crate::state::FluidState;

const USAGE: &str = "\
misbulk: solver and breakdown certifier for bulk-viscous relativistic fluids

USAGE:
    misbulk <SUBCOMMAND> --config <FILE> [OPTIONS]

SUBCOMMANDS:
    validate-eos     check the structural assumptions of the constitutive set
    certify          assemble a breakdown certificate for the shell data
    find-sigma0      search for the smallest certified velocity amplitude
    flowline         integrate one flow line and emit a CSV
    simulate         evolve the shell data, emit diagnostics and snapshots
    riemann-check    eigenstructure and Riemann-invariant obstruction table

OPTIONS:
    --config <FILE>              configuration file (required)
    --out <DIR>                  override the [output] directory
    --tmax <T>                   override [grid] t_max (simulate)
    --verify-certificate <FILE>  re-check a stored certificate (certify)
";

/// Formats a float as its shortest round-trip decimal.
fn fmt(x: f64) -> String {
    format!("{x:?}")
}

fn fmt_opt(x: Option<f64>) -> String {
    match x {
        Some(v) if v.is_finite() => fmt(v),
        _ => String::new(),
    }
}

struct Args {
    config: Option<PathBuf>,
    out: Option<PathBuf>,
    tmax: Option<f64>,
    verify: Option<PathBuf>,
}

fn parse_flags(args: &[String]) -> Result<Args, String> {
    let mut out = Args { config: None, out: None, tmax: None, verify: None };
    let mut it = args.iter();
    while let Some(flag) = it.next() {
        let mut value = |name: &str| {
            it.next().map(|s| s.to_string()).ok_or_else(|| format!("{name} needs a value"))
        };
        match flag.as_str() {
            "--config" => out.config = Some(PathBuf::from(value("--config")?)),
            "--out" => out.out = Some(PathBuf::from(value("--out")?)),
            "--tmax" => {
                out.tmax = Some(
                    value("--tmax")?
                        .parse()
                        .map_err(|_| "--tmax needs a number".to_string())?,
                )
            }
            "--verify-certificate" => {
                out.verify = Some(PathBuf::from(value("--verify-certificate")?))
            }
            other => return Err(format!("unknown option '{other}'")),
        }
    }
    Ok(out)
}

fn load(args: &Args) -> Result<RunConfig, i32> {
    let Some(path) = &args.config else {
        eprintln!("error: --config is required\n\n{USAGE}");
        return Err(2);
    };
    match parse_config(path) {
        Ok(cfg) => Ok(cfg),
        Err(errs) => {
            for e in errs {
                eprintln!("config error: {e}");
            }
            Err(2)
        }
    }
}

fn build_set(cfg: &RunConfig) -> Result<ConstitutiveSet, i32> {
    cfg.constitutive_set().map_err(|errs| {
        for e in errs {
            eprintln!("config error: {e}");
        }
        2
    })
}

fn build_shell(cfg: &RunConfig, set: &ConstitutiveSet) -> Result<ShellData, i32> {
    cfg.shell_data(set).map_err(|e| {
        eprintln!("config error: {e}");
        2
    })
}

fn out_dir(cfg: &RunConfig, args: &Args) -> Result<PathBuf, i32> {
    let dir = args.out.clone().unwrap_or_else(|| cfg.output.directory.clone());
    std::fs::create_dir_all(&dir).map_err(|e| {
        eprintln!("error: cannot create output directory {}: {e}", dir.display());
        1
    })?;
    Ok(dir)
}

fn write_file(path: &Path, contents: &str) -> Result<(), i32> {
    std::fs::write(path, contents).map_err(|e| {
        eprintln!("error: cannot write {}: {e}", path.display());
        1
    })
}

/// Entry point used by the binary: dispatches a subcommand, returns the
/// process exit code.
pub fn dispatch(args: &[String]) -> i32 {
    let Some(cmd) = args.first() else {
        eprint!("{USAGE}");
        return 2;
    };
    let flags = match parse_flags(&args[1..]) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("error: {e}\n\n{USAGE}");
            return 2;
        }
    };
    match cmd.as_str() {
        "validate-eos" => cmd_validate_eos(&flags),
        "certify" => cmd_certify(&flags),
        "find-sigma0" => cmd_find_sigma0(&flags),
        "flowline" => cmd_flowline(&flags),
        "simulate" => cmd_simulate(&flags),
        "riemann-check" => cmd_riemann_check(&flags),
        "--help" | "-h" | "help" => {
            print!("{USAGE}");
            0
        }
        other => {
            eprintln!("error: unknown subcommand '{other}'\n\n{USAGE}");
            2
        }
    }
}

fn cmd_validate_eos(args: &Args) -> i32 {
    let cfg = match load(args) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let set = match build_set(&cfg) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let spec = SampleSpec {
        rho_range: (-5.0 * cfg.background.rho_bar, 10.0 * cfg.background.rho_bar),
        n_range: (0.01 * cfg.background.n_bar, 10.0 * cfg.background.n_bar),
        ..Default::default()
    };
    let report = validate_assumptions(&set, &spec);
    println!(
        "sampled {} points ({} physical) over rho in [{}, {}], n in [{}, {}]",
        report.total_samples,
        report.physical_samples,
        fmt(spec.rho_range.0),
        fmt(spec.rho_range.1),
        fmt(spec.n_range.0),
        fmt(spec.n_range.1)
    );
    for v in &report.violations {
        println!("VIOLATION [{}] at rho={}, n={}: {}", v.check, fmt(v.rho), fmt(v.n), v.detail);
    }
    let mut failed = !report.passed();
    match abar_bound(&set, &cfg.abar_spec()) {
        Ok(est) => println!(
            "transport bound: abar = {} (quadrature error {:e}, rho interval [{}, {}])",
            fmt(est.value),
            est.quad_error,
            fmt(est.spec_used.rho_interval.0),
            fmt(est.spec_used.rho_interval.1)
        ),
        Err(e) => {
            println!("VIOLATION [transport integrability] {e}");
            failed = true;
        }
    }
    if failed {
        println!("result: FAIL");
        1
    } else {
        println!("result: PASS");
        0
    }
}

fn print_certificate_report(cert: &Certificate) {
    println!("background: rho_bar={} n_bar={} p_bar={}", fmt(cert.rho_bar), fmt(cert.n_bar), fmt(cert.p_bar));
    println!("sound speed c = {}  threshold = {}", fmt(cert.c), fmt(cert.threshold));
    println!(
        "shell: r0={} ell={} smooth_w={} sigma={}",
        fmt(cert.r0),
        fmt(cert.ell),
        fmt(cert.smooth_w),
        fmt(cert.sigma)
    );
    println!("ratio = {} ({})", fmt(cert.ratio), if cert.ratio_cond { "above threshold" } else { "BELOW threshold" });
    println!("abar = {}  |Pi0|_inf = {}  b = {}  k = {}", fmt(cert.abar), fmt(cert.pi_sup), fmt(cert.b), fmt(cert.k));
    println!("E = {}  Q0 = {}  T_kin(0) = {}", fmt(cert.e0), fmt(cert.q0), fmt(cert.t_kin0));
    println!("mu = {}  Rbar = {}  A = {}  B = {}  z0 = {}", fmt(cert.mu), fmt(cert.rbar), fmt(cert.a_coef), fmt(cert.b_coef), fmt_opt(cert.z0));
    println!("cond1 = {}  cond2 = {}  cond3 = {}", cert.cond1, cert.cond2, cert.cond3);
    println!("valid = {}  T_upper = {}", cert.valid, fmt(cert.t_upper));
    for r in &cert.reasons {
        println!("reason: {r}");
    }
}

fn cmd_certify(args: &Args) -> i32 {
    let cfg = match load(args) {
        Ok(c) => c,
        Err(code) => return code,
    };
    if let Some(path) = &args.verify {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read {}: {e}", path.display());
                return 2;
            }
        };
        let cert = match Certificate::from_key_values(&text) {
            Ok(c) => c,
            Err(e) => {
                eprintln!("error: malformed certificate: {e}");
                return 1;
            }
        };
        let bad = cert.recheck();
        if bad.is_empty() {
            println!("certificate verifies: all derived flags reproduce from stored constants");
            return 0;
        }
        for b in &bad {
            println!("MISMATCH: {b}");
        }
        return 1;
    }
    let set = match build_set(&cfg) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let data = match build_shell(&cfg, &set) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let cert = certifier::certify(&data, &set, &cfg.certify_spec());
    print_certificate_report(&cert);
    let dir = match out_dir(&cfg, args) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let path = dir.join("certificate.txt");
    if write_file(&path, &cert.to_key_values()).is_err() {
        return 1;
    }
    println!("wrote {}", path.display());
    if cert.valid {
        0
    } else {
        1
    }
}

fn cmd_find_sigma0(args: &Args) -> i32 {
    let cfg = match load(args) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let set = match build_set(&cfg) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let data = match build_shell(&cfg, &set) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let spec: CertifySpec = cfg.certify_spec();
    let range = (cfg.certify.sigma_lo, cfg.certify.sigma_hi);
    match certifier::find_sigma0(&data, &set, range, &spec) {
        Ok(search) => {
            println!("probed amplitudes:");
            for (sigma, ok) in &search.sweep {
                println!("  sigma = {:<22} certified = {ok}", fmt(*sigma));
            }
            println!("sigma0 = {}", fmt(search.sigma0));
            print_certificate_report(&search.certificate);
            let dir = match out_dir(&cfg, args) {
                Ok(d) => d,
                Err(code) => return code,
            };
            let path = dir.join("certificate.txt");
            if write_file(&path, &search.certificate.to_key_values()).is_err() {
                return 1;
            }
            println!("wrote {}", path.display());
            0
        }
        Err(nf) => {
            println!("no certified amplitude in [{}, {}]:", fmt(range.0), fmt(range.1));
            for (sigma, ok) in &nf.sweep {
                println!("  sigma = {:<22} certified = {ok}", fmt(*sigma));
            }
            for r in &nf.last_reasons {
                println!("reason at largest probe: {r}");
            }
            1
        }
    }
}

fn cmd_flowline(args: &Args) -> i32 {
    let cfg = match load(args) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let set = match build_set(&cfg) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let fl = &cfg.flowline;
    let theta: Box<dyn Fn(f64) -> f64> = match fl.theta.as_str() {
        "constant" => {
            let a = fl.theta_amp;
            Box::new(move |_| a)
        }
        _ => {
            let (a, om, ph) = (fl.theta_amp, fl.theta_omega, fl.theta_phase);
            Box::new(move |tau| a * (om * tau + ph).sin())
        }
    };
    let state0 = FluidState::new_1d(cfg.background.rho_bar, cfg.background.n_bar, fl.pi0, 0.0);
    let opts = FlowlineOptions { rtol: fl.tol, n_floor_rel: fl.n_floor_rel, ..Default::default() };
    let path = flowline::integrate_flowline(&state0, &set, &theta, fl.tau_max, &opts);
    let abar = abar_bound(&set, &cfg.abar_spec()).ok().map(|e| e.value);
    let bound = abar.map(|a| flowline::pi_bound(fl.pi0, a));
    let n0 = if fl.n0 > 0.0 { fl.n0 } else { cfg.background.n_bar };
    let char_opts = flowline::CharOptions::default();

    let mut csv = String::from("tau,rho,n,Pi,e,bound_Pi,F\n");
    for s in &path.samples {
        let f = flowline::eval_transport_f(&set, s.rho, s.n, s.pi, n0, fl.eps, &char_opts);
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt(s.tau),
            fmt(s.rho),
            fmt(s.n),
            fmt(s.pi),
            fmt(s.e),
            fmt_opt(bound),
            fmt_opt(f)
        ));
    }
    let dir = match out_dir(&cfg, args) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let file = dir.join("flowline.csv");
    if write_file(&file, &csv).is_err() {
        return 1;
    }
    println!(
        "integrated to tau = {} ({} samples, outcome {:?})",
        fmt(path.samples.last().map(|s| s.tau).unwrap_or(0.0)),
        path.samples.len(),
        path.outcome
    );
    println!("wrote {}", file.display());
    0
}

fn diagnostics_csv(sol: &SolutionRun) -> String {
    let mut csv = String::from(
        "t,E,I,Q,T_kin,virial_residual,Idot_minus_Q,max_grad_u,min_cs2,max_cs2,min_e,max_abs_Pi,support_radius,z\n",
    );
    for r in &sol.rows {
        csv.push_str(&format!(
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
            fmt(r.t),
            fmt_opt(Some(r.e)),
            fmt_opt(Some(r.moment)),
            fmt_opt(Some(r.q)),
            fmt_opt(Some(r.t_kin)),
            fmt_opt(r.virial_residual),
            fmt_opt(r.idot_minus_q),
            fmt(r.max_grad_u),
            fmt(r.min_cs2),
            fmt(r.max_cs2),
            fmt(r.min_e),
            fmt(r.max_abs_pi),
            fmt(r.support_radius),
            fmt_opt(Some(r.z))
        ));
    }
    csv
}

fn snapshot_csv(grid: &solver::Grid1d, snap: &solver::Snapshot, set: &ConstitutiveSet) -> String {
    let coord = match grid.kind {
        solver::GridKind::Radial => "r",
        solver::GridKind::Planar => "x",
    };
    let mut csv = format!("{coord},rho,n,Pi,u,cs2,e\n");
    for i in 0..grid.n_nodes() {
        let (rho, nn, pi, u) = (snap.rho[i], snap.n[i], snap.pi[i], snap.u[i]);
        let cs2 = set.sound_speed_sq_raw(rho, nn, pi);
        let e = rho + set.pressure(rho, nn) + pi;
        csv.push_str(&format!(
            "{},{},{},{},{},{},{}\n",
            fmt(grid.x(i)),
            fmt(rho),
            fmt(nn),
            fmt(pi),
            fmt(u),
            fmt(cs2),
            fmt(e)
        ));
    }
    csv
}

fn cmd_simulate(args: &Args) -> i32 {
    let cfg = match load(args) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let set = match build_set(&cfg) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let data = match build_shell(&cfg, &set) {
        Ok(d) => d,
        Err(code) => return code,
    };
    let bg = data.background;
    let grid = cfg.grid();
    let init = solver::snapshot_from_shell(&grid, &data, &set);
    let abar = abar_bound(&set, &cfg.abar_spec()).ok().map(|e| e.value);
    let (b, pi_bound) = match abar {
        Some(a) => {
            let (b, _) = certifier::constants_bk(&set, &data, a);
            (b, Some(flowline::pi_bound(certifier::pi_sup(&data, 1024), a)))
        }
        None => {
            println!("note: transport bound integral diverges; Pi monitor disabled");
            (f64::NAN, None)
        }
    };
    let ctx = VirialContext {
        rho_bar: bg.rho_bar,
        n_bar: bg.n_bar,
        p_bar: bg.pressure(&set),
        b,
        c: bg.sound_speed(&set),
        r0: data.r0,
    };
    let spec = RunSpec {
        t_max: args.tmax.unwrap_or(cfg.grid.t_max),
        out_interval: cfg.grid.out_interval,
        scheme: cfg.scheme(),
        thresholds: cfg.solver_thresholds(),
        support_tol: cfg.thresholds.support_tol,
        leak_tol: cfg.thresholds.leak_tol,
        snapshot_every: cfg.output.snapshot_every,
        stop_on_breakdown: true,
        pi_bound,
    };
    let sol = solver::run(&grid, &set, &bg, init, &ctx, &spec);

    let dir = match out_dir(&cfg, args) {
        Ok(d) => d,
        Err(code) => return code,
    };
    if write_file(&dir.join("diagnostics.csv"), &diagnostics_csv(&sol)).is_err() {
        return 1;
    }
    for (idx, snap) in &sol.snapshots {
        let name = format!("snap_{idx:05}.csv");
        if write_file(&dir.join(name), &snapshot_csv(&grid, snap, &set)).is_err() {
            return 1;
        }
    }
    // Run-time monitor for the two a-priori Q bounds over the admissible
    // portion of the run (only meaningful with a finite envelope constant).
    let q_bounds = if b.is_finite() && grid.kind == solver::GridKind::Radial {
        let e0 = sol.rows[0].e;
        let violated = sol
            .rows
            .iter()
            .filter(|r| sol.breakdown.map(|bd| r.t < bd.time).unwrap_or(true))
            .find(|r| {
                !solver::check_q_bounds(r, b, ctx.radius_at(r.t), e0, cfg.thresholds.qbound_tol)
            });
        match violated {
            Some(r) => format!("VIOLATED at t = {}", fmt(r.t)),
            None => "hold at every row".to_string(),
        }
    } else {
        "not monitored".to_string()
    };

    let mut report = String::new();
    match &sol.breakdown {
        Some(b) => {
            report.push_str(&format!(
                "breakdown detected\ntime = {}\ncause = {}\ncell = {}\nposition = {}\nvalue = {}\n",
                fmt(b.time),
                b.cause,
                b.cell,
                fmt(b.position),
                fmt(b.value)
            ));
        }
        None => report.push_str("no breakdown detected\n"),
    }
    report.push_str(&format!("q_bounds = {q_bounds}\n"));
    report.push_str(&format!(
        "rows = {}\ne_drift = {}\nmax_leak = {}\npi_bound_monitor = {}\n",
        sol.rows.len(),
        fmt(sol.e_drift),
        fmt(sol.max_leak),
        match pi_bound {
            Some(b) => format!("enabled (bound {})", fmt(b)),
            None => "disabled (transport bound integral diverges)".to_string(),
        }
    ));
    if write_file(&dir.join("breakdown.txt"), &report).is_err() {
        return 1;
    }
    print!("{report}");
    println!("wrote {}", dir.join("diagnostics.csv").display());
    0
}

fn cmd_riemann_check(args: &Args) -> i32 {
    let cfg = match load(args) {
        Ok(c) => c,
        Err(code) => return code,
    };
    let set = match build_set(&cfg) {
        Ok(s) => s,
        Err(code) => return code,
    };
    let rs = &cfg.riemann;
    let lin = |lo: f64, hi: f64, k: usize, m: usize| {
        if m <= 1 {
            lo
        } else {
            lo + (hi - lo) * k as f64 / (m - 1) as f64
        }
    };
    let mut states = Vec::new();
    for i in 0..rs.rho_samples {
        for j in 0..rs.u_samples {
            for k in 0..rs.pi_samples {
                states.push(FluidState::new_1d(
                    lin(rs.rho_lo, rs.rho_hi, i, rs.rho_samples),
                    cfg.background.n_bar,
                    lin(rs.pi_lo, rs.pi_hi, k, rs.pi_samples),
                    lin(rs.u_lo, rs.u_hi, j, rs.u_samples),
                ));
            }
        }
    }
    let out = std::io::stdout();
    let mut w = out.lock();
    let _ = writeln!(
        w,
        "{:>10} {:>8} {:>10} {:>10} {:>10} {:>10} {:>11} {:>11}",
        "rho", "u1", "q", "lambda1", "lambda2", "lambda3", "eig_resid", "nc_resid"
    );
    let mut max_resid = 0.0f64;
    for s in &states {
        let q = set.pressure(s.rho, s.n) + s.pi;
        let eig = riemann::eigensystem(s, &set);
        let resid = riemann::eigen_residual(s, &set);
        max_resid = max_resid.max(resid);
        let nc = riemann::necessary_condition_residual(&set, s.rho, s.n, q)
            .map(fmt)
            .unwrap_or_else(|_| "degenerate".to_string());
        let _ = writeln!(
            w,
            "{:>10.5} {:>8.3} {:>10.5} {:>10.6} {:>10.6} {:>10.6} {:>11.3e} {:>11}",
            s.rho, s.u[0], q, eig.lambdas[0], eig.lambdas[1], eig.lambdas[2], resid, nc
        );
    }
    let defect = riemann::curl_obstruction(&set, &states);
    let _ = writeln!(w, "max eigen residual  = {max_resid:.3e}");
    let _ = writeln!(w, "max curl defect     = {}", fmt(defect));
    let _ = writeln!(
        w,
        "Riemann invariants {}",
        if defect > 1e-10 {
            "are obstructed on this grid (nonzero defect)"
        } else {
            "are not obstructed on this grid"
        }
    );
    0
}
