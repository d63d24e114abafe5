//! Acceptance suite: one test per criterion, each printing a PASS line with
//! its measured quantities (visible with `cargo test -- --nocapture`).

mod common;

use std::sync::OnceLock;
use std::time::Instant;

use common::{
    acceptance_background, acceptance_certify_spec, acceptance_set, acceptance_shell,
    certified_search, TestRng,
};
use misbulk::certifier::{blowup_conditions, certify, shell_ratio, threshold, SigmaSearch};
use misbulk::constitutive::{abar_bound, AbarSpec, ConstitutiveSet, LambdaFamily, TransportFamily};
use misbulk::flowline::{
    integrate_flowline, pi_bound, solve_f_characteristic, CharAnchor, CharOptions,
    FlowlineOptions, FlowlineOutcome,
};
use misbulk::riemann;
use misbulk::shell::ShellData;
use misbulk::solver::{
    check_q_bounds, run, snapshot_from_shell, BreakdownCause, Grid1d, GridKind, RunSpec, Scheme,
    SolutionRun, VirialContext,
};
use misbulk::state::{ConstantState, FluidState};

fn pass(criterion: u32, elapsed: std::time::Duration, budget_s: f64, detail: &str) {
    println!("PASS criterion {criterion}: {detail} [{elapsed:.2?}]");
    assert!(
        elapsed.as_secs_f64() < budget_s,
        "criterion {criterion} exceeded its runtime budget: {elapsed:?} > {budget_s}s"
    );
}

#[test]
fn criterion_01_sound_speed_reduction() {
    let t0 = Instant::now();
    let mut rng = TestRng::new(101);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let gamma = rng.range(1.1, 1.9);
        let m = rng.range(0.0, 1.0);
        let set = ConstitutiveSet::ideal_gas(gamma, m);
        let n = rng.range(0.1, 5.0);
        let rho = rng.range(m * n + 0.1, 10.0);
        let a = set.sound_speed_sq(rho, n, 0.0).unwrap();
        let b = set.euler_sound_speed_sq(rho, n).unwrap();
        worst = worst.max((a - b).abs());
    }
    assert!(worst <= 1e-14, "max abs error {worst}");
    pass(1, t0.elapsed(), 1.0, &format!("viscous sound speed reduces to Euler, max err {worst:e}"));
}

#[test]
fn criterion_02_z0_limit() {
    let t0 = Instant::now();
    let mut worst = 0.0f64;
    for i in 1..=9 {
        let c = i as f64 / 10.0;
        // b = k = 0 collapses the envelope coefficients to A = c, B = 0.
        let conds = blowup_conditions(1.0, 0.0, 0.0, c, 1.0, 2.0);
        let z0 = conds.z0.expect("z0 defined");
        worst = worst.max((z0 - 2.0 * c / (c * c + 1.0)).abs());
    }
    assert!(worst <= 1e-12, "max abs error {worst}");
    pass(2, t0.elapsed(), 1.0, &format!("z0(A=c, B=0) = 2c/(c^2+1), max err {worst:e}"));
}

/// Random structurally compliant set + forcing for the flow-line suites.
struct RandomFlowCase {
    set: ConstitutiveSet,
    state0: FluidState,
    amp: f64,
    omega: f64,
    phase: f64,
}

fn random_flow_case(rng: &mut TestRng, fixed_transport: bool, k: usize) -> RandomFlowCase {
    let gamma = rng.range(1.2, 1.8);
    let (zeta, tau0) = if fixed_transport {
        (TransportFamily::power(1.0, 1.0, 1.0), TransportFamily::Constant(1.0))
    } else {
        (
            TransportFamily::power(rng.range(0.0, 2.0), 1.0, 1.0),
            TransportFamily::Constant(rng.range(0.5, 2.0)),
        )
    };
    let lambda = if rng.uniform() < 0.5 {
        LambdaFamily::Zero
    } else {
        LambdaFamily::Constant(rng.range(1e-3, 0.02))
    };
    // m = 0 keeps rho + p = gamma rho >= 0 on the whole half-line, so the
    // structural inequalities hold along the entire path.
    let set = ConstitutiveSet::ideal_gas(gamma, 0.0).with_transport(zeta, tau0).with_lambda(lambda);
    let rho0 = rng.range(0.5, 2.0);
    let n0 = rng.range(0.3, 2.0);
    // e(0) >= 0, with an exact boundary case every 50th draw.
    let pi0 = if k % 50 == 7 {
        -gamma * rho0
    } else {
        rng.range(-0.9 * gamma * rho0, 0.5)
    };
    RandomFlowCase {
        set,
        state0: FluidState::new_1d(rho0, n0, pi0, 0.0),
        amp: rng.range(-0.5, 0.5),
        omega: rng.range(0.5, 3.0),
        phase: rng.range(0.0, std::f64::consts::TAU),
    }
}

#[test]
fn criterion_03_wec_propagation() {
    let t0 = Instant::now();
    let mut rng = TestRng::new(303);
    let opts = FlowlineOptions::default();
    let mut min_e = f64::INFINITY;
    for k in 0..1000 {
        let case = random_flow_case(&mut rng, false, k);
        assert!(case.state0.wec_value(&case.set) >= -1e-15);
        let theta = move |tau: f64| case.amp * (case.omega * tau + case.phase).sin();
        let path = integrate_flowline(&case.state0, &case.set, &theta, 2.0, &opts);
        assert_eq!(path.outcome, FlowlineOutcome::Completed, "case {k} did not complete");
        // The suite is built to stay inside the structural hypotheses;
        // verify rather than assume.
        for s in &path.samples {
            let lam = case.set.lambda(s.rho, s.n);
            let p = case.set.pressure(s.rho, s.n);
            assert!(s.rho + p >= -1e-12, "case {k}: rho + p < 0");
            assert!(lam * (s.rho + p) < 1.0, "case {k}: nonlinear bound breached");
        }
        min_e = min_e.min(path.min_e());
    }
    assert!(min_e >= -1e-10, "min e = {min_e}");
    pass(3, t0.elapsed(), 30.0, &format!("WEC propagated on 1000 flow lines, min e = {min_e:e}"));
}

#[test]
fn criterion_04_pi_a_priori_bound() {
    let t0 = Instant::now();
    let set0 = ConstitutiveSet::ideal_gas(1.5, 0.0)
        .with_transport(TransportFamily::power(1.0, 1.0, 1.0), TransportFamily::Constant(1.0));
    let abar = abar_bound(&set0, &AbarSpec::default()).unwrap().value;
    assert!((abar - 1.0).abs() <= 1e-6, "abar = {abar}");
    let mut rng = TestRng::new(404);
    let opts = FlowlineOptions::default();
    let mut worst_excess = f64::NEG_INFINITY;
    for k in 0..1000 {
        let case = random_flow_case(&mut rng, true, k);
        let theta = move |tau: f64| case.amp * (case.omega * tau + case.phase).sin();
        let path = integrate_flowline(&case.state0, &case.set, &theta, 2.0, &opts);
        assert_eq!(path.outcome, FlowlineOutcome::Completed);
        // With Abar = 1 the a-priori bound reads |Pi(0)| + 3 exactly.
        worst_excess = worst_excess.max(path.max_abs_pi() - (case.state0.pi.abs() + 3.0));
    }
    assert!(worst_excess <= 1e-8, "bound exceeded by {worst_excess:e}");
    pass(
        4,
        t0.elapsed(),
        30.0,
        &format!("|Pi| <= |Pi(0)| + 3 Abar on 1000 flow lines (worst excess {worst_excess:e})"),
    );
}

#[test]
fn criterion_05_transport_residual() {
    let t0 = Instant::now();
    let set = ConstitutiveSet::ideal_gas(4.0 / 3.0, 0.0)
        .with_transport(TransportFamily::power(1.0, 1.0, 1.0), TransportFamily::Constant(1.0));
    let opts = CharOptions::default();
    let mut rng = TestRng::new(505);
    let mut worst_residual = 0.0f64;
    let mut max_dpi_f = f64::NEG_INFINITY;
    for _ in 0..100 {
        let anchor =
            CharAnchor { rho0: rng.range(0.5, 3.0), n0: 1.0, pi0: rng.range(-0.5, 0.5) };
        let sol = solve_f_characteristic(&set, &anchor, 1e-3, (0.05, 20.0), &opts);
        assert!(sol.escaped.is_none());
        let s = &sol.samples;
        for i in 1..s.len() - 1 {
            let d = (s[i + 1].f - s[i - 1].f) / (2.0 * opts.log_step);
            let src = set.zeta_over_tau0(s[i].rho, s[i].n);
            worst_residual = worst_residual.max((d - src).abs());
        }
        for d in &sol.dpi_f {
            max_dpi_f = max_dpi_f.max(*d);
        }
    }
    assert!(worst_residual <= 1e-6, "residual {worst_residual:e}");
    assert!(max_dpi_f < 0.0, "dF/dPi not negative everywhere: {max_dpi_f:e}");
    pass(
        5,
        t0.elapsed(),
        10.0,
        &format!(
            "transport equation satisfied on characteristics (residual {worst_residual:e}, max dF/dPi {max_dpi_f:e})"
        ),
    );
}

#[test]
fn criterion_06_shell_ratio() {
    let t0 = Instant::now();
    let set = acceptance_set();
    let bg = acceptance_background(&set);
    // Closed form: R0 = 1, ell = 1/2, uniform e, sharp edges.
    let data = ShellData::new(1.0, 0.5, 1.0, 0.0, bg).unwrap();
    let r = shell_ratio(&data, &set).unwrap().ratio;
    let err = (r - 45.0 / 56.0).abs();
    assert!(err <= 1e-8, "ratio {r} vs 45/56");
    // ratio increases toward 1 as ell shrinks and crosses every threshold.
    let ratio_of = |ell: f64| {
        let d = ShellData::new(1.0, ell, 1.0, 0.0, bg).unwrap();
        shell_ratio(&d, &set).unwrap().ratio
    };
    let mut prev = 0.0;
    for ell in [0.5, 0.25, 0.1, 0.05, 0.01, 0.002] {
        let r = ratio_of(ell);
        assert!(r > prev);
        prev = r;
    }
    assert!(prev > 0.999);
    for i in 1..20 {
        let c = i as f64 / 20.0;
        let thr = threshold(c);
        // Geometric ladder of thicknesses down to 1e-5.
        let crossed = (0..40).any(|k| ratio_of(0.5 * 0.76f64.powi(k)) > thr);
        assert!(crossed, "no shell beats threshold for c = {c}");
    }
    pass(6, t0.elapsed(), 5.0, &format!("closed-form ratio 45/56 within {err:e}; thin-shell limit reaches every threshold"));
}

fn search() -> &'static SigmaSearch {
    static SEARCH: OnceLock<SigmaSearch> = OnceLock::new();
    SEARCH.get_or_init(certified_search)
}

#[test]
fn criterion_07_certification() {
    let t0 = Instant::now();
    let set = acceptance_set();
    let data = acceptance_shell(&set);
    let s = search();
    let cert = &s.certificate;
    assert!(s.sigma0.is_finite() && s.sigma0 > 0.0);
    assert!(cert.valid, "certificate invalid: {:?}", cert.reasons);
    let want_t_upper = (cert.mu - 1.0) * cert.r0 / cert.c;
    assert!(
        (cert.t_upper - want_t_upper).abs() <= 1e-12 * want_t_upper,
        "T_upper {} vs (mu-1)R0/c {}",
        cert.t_upper,
        want_t_upper
    );
    let doubled = certify(&data.with_sigma(2.0 * s.sigma0), &set, &acceptance_certify_spec());
    assert!(doubled.valid, "doubled amplitude lost certification: {:?}", doubled.reasons);
    pass(
        7,
        t0.elapsed(),
        10.0,
        &format!(
            "sigma0 = {:.3} certified, T_upper = {:.4} = (mu-1)R0/c, 2 sigma0 stays valid",
            s.sigma0, cert.t_upper
        ),
    );
}

/// Certified-shell runs shared by criteria 8-10.
struct CertifiedRuns {
    ctx: VirialContext,
    /// N = 2000, output every 5e-5.
    run_2000: SolutionRun,
    /// N = 4000, output every 5e-5 (breakdown-time comparison).
    run_4000_same_out: SolutionRun,
    /// N = 4000, output every 2.5e-5 (space-time refinement pair).
    run_4000_refined: SolutionRun,
    t_upper: f64,
}

fn certified_runs() -> &'static CertifiedRuns {
    static RUNS: OnceLock<CertifiedRuns> = OnceLock::new();
    RUNS.get_or_init(|| {
        let set = acceptance_set();
        let s = search();
        let cert = &s.certificate;
        let data = acceptance_shell(&set).with_sigma(s.sigma0);
        let bg = data.background;
        let ctx = VirialContext {
            rho_bar: bg.rho_bar,
            n_bar: bg.n_bar,
            p_bar: bg.pressure(&set),
            b: cert.b,
            c: cert.c,
            r0: cert.r0,
        };
        let spec = |out: f64| RunSpec {
            t_max: 0.05,
            out_interval: out,
            scheme: Scheme::default(),
            pi_bound: Some(pi_bound(0.0, cert.abar)),
            ..Default::default()
        };
        let make = |n: usize, out: f64| {
            let grid = Grid1d::new(GridKind::Radial, n, 2.0);
            let init = snapshot_from_shell(&grid, &data, &set);
            run(&grid, &set, &bg, init, &ctx, &spec(out))
        };
        CertifiedRuns {
            ctx,
            run_2000: make(2000, 5e-5),
            run_4000_same_out: make(4000, 5e-5),
            run_4000_refined: make(4000, 2.5e-5),
            t_upper: cert.t_upper,
        }
    })
}

fn max_residuals_in_window(sol: &SolutionRun, window: f64) -> (f64, f64) {
    let mut idq = 0.0f64;
    let mut vir = 0.0f64;
    for row in &sol.rows {
        if row.t > window {
            break;
        }
        if let (Some(a), Some(b)) = (row.idot_minus_q, row.virial_residual) {
            idq = idq.max(a);
            vir = vir.max(b);
        }
    }
    (idq, vir)
}

#[test]
fn criterion_08_virial_identities() {
    let t0 = Instant::now();
    let runs = certified_runs();
    let sol = &runs.run_2000;
    assert!(sol.e_drift <= 1e-4, "energy drift {:e}", sol.e_drift);
    let e0 = sol.rows[0].e;
    for row in &sol.rows {
        if sol.breakdown.map(|b| row.t >= b.time).unwrap_or(false) {
            break;
        }
        assert!(
            check_q_bounds(row, runs.ctx.b, runs.ctx.radius_at(row.t), e0, 1e-6),
            "Q bounds violated at t = {}",
            row.t
        );
    }
    // Space-time refinement (dx and the output interval both halve) over a
    // common window before the fronts steepen.
    let window = 1e-3;
    let (idq_c, vir_c) = max_residuals_in_window(sol, window);
    let (idq_f, vir_f) = max_residuals_in_window(&runs.run_4000_refined, window);
    let order_idq = (idq_c / idq_f).log2();
    let order_vir = (vir_c / vir_f).log2();
    assert!(order_idq >= 1.8, "Idot-Q residual order {order_idq:.2}");
    assert!(order_vir >= 1.8, "virial residual order {order_vir:.2}");
    pass(
        8,
        t0.elapsed(),
        300.0,
        &format!(
            "E drift {:.2e}, Q bounds hold, residual orders {:.2} (Idot-Q) and {:.2} (virial)",
            sol.e_drift, order_idq, order_vir
        ),
    );
}

#[test]
fn criterion_09_finite_propagation() {
    let t0 = Instant::now();
    let runs = certified_runs();
    let sol = &runs.run_2000;
    assert!(sol.max_leak <= 1e-6, "leak {:e} outside the causal ball", sol.max_leak);
    pass(
        9,
        t0.elapsed(),
        300.0,
        &format!("deviation outside R0 + ct stays at {:.1e} until breakdown", sol.max_leak),
    );
}

#[test]
fn criterion_10_breakdown_occurrence() {
    let t0 = Instant::now();
    let runs = certified_runs();
    let b1 = runs.run_2000.breakdown.expect("breakdown at N = 2000");
    let b2 = runs.run_4000_same_out.breakdown.expect("breakdown at N = 4000");
    assert!(b1.time <= runs.t_upper, "t* = {} exceeds T_upper = {}", b1.time, runs.t_upper);
    for b in [&b1, &b2] {
        assert!(
            matches!(
                b.cause,
                BreakdownCause::GradientBlowup
                    | BreakdownCause::LeftPhysicalSet
                    | BreakdownCause::WecViolation
            ),
            "unexpected cause {:?}",
            b.cause
        );
    }
    let shift = (b2.time - b1.time).abs() / b1.time;
    assert!(shift < 0.05, "t* shift {:.3} between N and 2N", shift);
    pass(
        10,
        t0.elapsed(),
        600.0,
        &format!(
            "breakdown ({}) at t* = {:.5} <= T_upper = {:.4}; N -> 2N shift {:.2}%",
            b1.cause,
            b1.time,
            runs.t_upper,
            100.0 * shift
        ),
    );
}

#[test]
fn criterion_11_euler_consistency() {
    let t0 = Instant::now();
    // Zero bulk viscosity and zero initial Pi: the full system must
    // reproduce a run with Pi frozen at zero, cell for cell. A lighter
    // particle mass keeps the inviscid sound speed comfortably inside (0, 1)
    // throughout the run.
    let set = ConstitutiveSet::ideal_gas(4.0 / 3.0, 1.0);
    let bg = ConstantState::new(1.0, 0.5, &set).unwrap();
    let data = ShellData::new(1.0, 0.25, 0.5, 0.025, bg).unwrap();
    let grid = Grid1d::new(GridKind::Radial, 400, 2.0);
    let init = snapshot_from_shell(&grid, &data, &set);
    let ctx = VirialContext {
        rho_bar: bg.rho_bar,
        n_bar: bg.n_bar,
        p_bar: bg.pressure(&set),
        b: 1.0,
        c: bg.sound_speed(&set),
        r0: 1.0,
    };
    let spec = |freeze: bool| RunSpec {
        t_max: 0.5,
        out_interval: 0.05,
        scheme: Scheme { freeze_pi: freeze, ..Default::default() },
        ..Default::default()
    };
    let full = run(&grid, &set, &bg, init.clone(), &ctx, &spec(false));
    let frozen = run(&grid, &set, &bg, init, &ctx, &spec(true));
    assert!(full.breakdown.is_none() && frozen.breakdown.is_none());
    let (a, b) = (&full.final_snapshot, &frozen.final_snapshot);
    let mut worst = 0.0f64;
    for i in 0..grid.n_nodes() {
        worst = worst.max((a.rho[i] - b.rho[i]).abs());
        worst = worst.max((a.n[i] - b.n[i]).abs());
        worst = worst.max((a.pi[i] - b.pi[i]).abs());
        worst = worst.max((a.u[i] - b.u[i]).abs());
        assert_eq!(a.pi[i], 0.0, "Pi not preserved at node {i}");
    }
    assert!(worst <= 1e-10, "cell-wise difference {worst:e}");
    pass(11, t0.elapsed(), 120.0, &format!("inviscid run matches Pi-frozen run to {worst:e}"));
}

#[test]
fn criterion_12_riemann_obstruction() {
    let t0 = Instant::now();
    // Barotropic set for the eigenstructure sweep.
    let baro = ConstitutiveSet {
        eos: misbulk::constitutive::EosFamily::Linear { c_rho: 1.0 / 3.0, c_n: 0.0, offset: 0.0 },
        zeta: TransportFamily::Constant(0.1),
        tau0: TransportFamily::Constant(1.0),
        lambda: LambdaFamily::Zero,
        p0: 0.0,
        p1: 0.0,
        tau0_floor: 1.0,
    };
    let mut rng = TestRng::new(1212);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let s = FluidState::new_1d(
            rng.range(0.5, 3.0),
            rng.range(0.2, 2.0),
            rng.range(-0.2, 0.4),
            rng.range(-2.0, 2.0),
        );
        worst = worst.max(riemann::eigen_residual(&s, &baro));
    }
    assert!(worst <= 1e-10, "eigen residual {worst:e}");

    // Ideal-gas necessary-condition residual stays above gamma_ad - 1.
    let set = acceptance_set();
    let mut min_resid = f64::INFINITY;
    for _ in 0..2000 {
        let rho = rng.range(0.98, 5.0);
        let n = rng.range(0.1, 0.5 * rho);
        let pi = rng.range(-0.05, 0.3);
        let q = set.pressure(rho, n) + pi;
        if rho + q <= 0.0 {
            continue;
        }
        min_resid =
            min_resid.min(riemann::necessary_condition_residual(&set, rho, n, q).unwrap());
    }
    assert!(min_resid >= 1.0 / 3.0, "necessary residual {min_resid} below gamma_ad - 1");

    // Generic grid: defect clearly nonzero; degenerate family: exactly zero.
    let grid: Vec<FluidState> = (0..100)
        .map(|i| FluidState::new_1d(0.5 + 0.03 * i as f64, 0.5, 0.01 * (i % 7) as f64, 0.4))
        .collect();
    let defect = riemann::curl_obstruction(&baro, &grid);
    assert!(defect > 0.01, "generic curl defect {defect}");
    let degenerate = ConstitutiveSet {
        eos: misbulk::constitutive::EosFamily::Linear { c_rho: 0.0, c_n: 0.0, offset: 0.1 },
        ..ConstitutiveSet::ideal_gas(2.0, 1.0)
    };
    let zero_defect = riemann::curl_obstruction(&degenerate, &grid);
    assert_eq!(zero_defect, 0.0);
    pass(
        12,
        t0.elapsed(),
        10.0,
        &format!(
            "eigen residual {worst:.1e}, necessary residual >= 1/3, curl defect {defect:.3} (0 for constant pressure)"
        ),
    );
}
