//! End-to-end checks of the command-line surface: exit codes, file outputs,
//! determinism of the emitted CSVs, and the certificate verification loop.

use std::path::PathBuf;

fn workdir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("misbulk-cli-{name}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    std::fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(dir: &std::path::Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_string_lossy().into_owned()
}

fn args(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// A quick certified setup: moderate resolution so simulate runs in
/// milliseconds, physics identical in kind to the desk-scale study.
fn shell_config(outdir: &str) -> String {
    format!(
        "\
[eos]
family = ideal_gas
gamma_ad = 1.3333333333333333
m = 1.95

[transport]
zeta = power_exp
zeta_coeff = 1.0
zeta_n_exp = 1.0
zeta_decay = 1.0
tau0 = constant
tau0_value = 1.0
tau0_floor = 1.0

[background]
rho_bar = 1.0
n_bar = 0.5

[data]
r0 = 1.0
ell = 0.1
sigma = 180.0
smooth_w = 0.04
standoff = 0.02

[grid]
mode = radial
n_cells = 500
length = 2.0
t_max = 0.004
out_interval = 0.0005

[output]
directory = {outdir}
"
    )
}

#[test]
fn no_arguments_is_usage_error() {
    assert_eq!(misbulk::cli::dispatch(&[]), 2);
    assert_eq!(misbulk::cli::dispatch(&args(&["frobnicate"])), 2);
    assert_eq!(misbulk::cli::dispatch(&args(&["simulate"])), 2);
}

#[test]
fn config_errors_exit_2() {
    let dir = workdir("badcfg");
    let cfg = write_config(
        &dir,
        "bad.cfg",
        "[eos]\nfamily = ideal_gas\ngamma_adx = 2.0\n[background]\nrho_bar = 1.0\nn_bar = 0.5\n",
    );
    assert_eq!(misbulk::cli::dispatch(&args(&["certify", "--config", &cfg])), 2);
}

#[test]
fn validate_eos_pass_and_fail() {
    let dir = workdir("validate");
    let good = write_config(
        &dir,
        "good.cfg",
        "[eos]\nfamily = ideal_gas\ngamma_ad = 2.0\nm = 1.0\n\n[background]\nrho_bar = 2.0\nn_bar = 1.0\n",
    );
    assert_eq!(misbulk::cli::dispatch(&args(&["validate-eos", "--config", &good])), 0);
    // Constant zeta/tau0 fails the integrability requirement.
    let bad = write_config(
        &dir,
        "bad.cfg",
        "[eos]\nfamily = ideal_gas\ngamma_ad = 2.0\nm = 1.0\n\n[transport]\nzeta = constant\nzeta_value = 1.0\n\n[background]\nrho_bar = 2.0\nn_bar = 1.0\n",
    );
    assert_eq!(misbulk::cli::dispatch(&args(&["validate-eos", "--config", &bad])), 1);
}

#[test]
fn certify_writes_verifiable_certificate() {
    let dir = workdir("certify");
    let out = dir.join("out");
    let cfg = write_config(&dir, "shell.cfg", &shell_config(&out.to_string_lossy()));
    assert_eq!(misbulk::cli::dispatch(&args(&["certify", "--config", &cfg])), 0);
    let cert_path = out.join("certificate.txt");
    assert!(cert_path.exists());
    // The emitted file re-verifies.
    assert_eq!(
        misbulk::cli::dispatch(&args(&[
            "certify",
            "--config",
            &cfg,
            "--verify-certificate",
            &cert_path.to_string_lossy(),
        ])),
        0
    );
    // Tampering with a stored constant is caught.
    let text = std::fs::read_to_string(&cert_path).unwrap();
    let tampered = text.replace("cond3 = true", "cond3 = false");
    assert_ne!(text, tampered);
    let tampered_path = dir.join("tampered.txt");
    std::fs::write(&tampered_path, tampered).unwrap();
    assert_eq!(
        misbulk::cli::dispatch(&args(&[
            "certify",
            "--config",
            &cfg,
            "--verify-certificate",
            &tampered_path.to_string_lossy(),
        ])),
        1
    );
}

#[test]
fn certify_invalid_data_exits_1() {
    let dir = workdir("certify-invalid");
    let out = dir.join("out");
    let mut body = shell_config(&out.to_string_lossy());
    body = body.replace("sigma = 180.0", "sigma = 0.5");
    let cfg = write_config(&dir, "weak.cfg", &body);
    assert_eq!(misbulk::cli::dispatch(&args(&["certify", "--config", &cfg])), 1);
}

#[test]
fn find_sigma0_not_found_exits_1() {
    let dir = workdir("sigma-notfound");
    let out = dir.join("out");
    let mut body = shell_config(&out.to_string_lossy());
    body.push_str("\n[certify]\nsigma_lo = 0.001\nsigma_hi = 0.002\n");
    let cfg = write_config(&dir, "narrow.cfg", &body);
    assert_eq!(misbulk::cli::dispatch(&args(&["find-sigma0", "--config", &cfg])), 1);
}

#[test]
fn simulate_outputs_are_deterministic() {
    let dir = workdir("simulate");
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    let cfg = write_config(&dir, "shell.cfg", &shell_config(&dir.join("out").to_string_lossy()));
    let code = misbulk::cli::dispatch(&args(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        &out_a.to_string_lossy(),
    ]));
    assert_eq!(code, 0, "breakdown is still a successful run");
    let code = misbulk::cli::dispatch(&args(&[
        "simulate",
        "--config",
        &cfg,
        "--out",
        &out_b.to_string_lossy(),
    ]));
    assert_eq!(code, 0);
    let a = std::fs::read(out_a.join("diagnostics.csv")).unwrap();
    let b = std::fs::read(out_b.join("diagnostics.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "diagnostics.csv not byte-identical across reruns");
    let header = String::from_utf8_lossy(&a);
    assert!(header.starts_with(
        "t,E,I,Q,T_kin,virial_residual,Idot_minus_Q,max_grad_u,min_cs2,max_cs2,min_e,max_abs_Pi,support_radius,z\n"
    ));
    // The ultrarelativistic shell breaks down; the report says so.
    let report = std::fs::read_to_string(out_a.join("breakdown.txt")).unwrap();
    assert!(report.contains("breakdown detected"), "{report}");
}

#[test]
fn simulate_writes_snapshots_when_asked() {
    let dir = workdir("snaps");
    let out = dir.join("out");
    let mut body = shell_config(&out.to_string_lossy());
    body = body.replace("[output]", "[output]\nsnapshot_every = 2");
    let cfg = write_config(&dir, "shell.cfg", &body);
    assert_eq!(misbulk::cli::dispatch(&args(&["simulate", "--config", &cfg])), 0);
    let snap = std::fs::read_to_string(out.join("snap_00000.csv")).unwrap();
    assert!(snap.starts_with("r,rho,n,Pi,u,cs2,e\n"));
}

#[test]
fn flowline_emits_expected_columns() {
    let dir = workdir("flowline");
    let out = dir.join("out");
    let mut body = shell_config(&out.to_string_lossy());
    body.push_str("\n[flowline]\ntau_max = 1.0\npi0 = 0.1\ntheta = sinusoid\ntheta_amp = 0.2\n");
    let cfg = write_config(&dir, "shell.cfg", &body);
    assert_eq!(misbulk::cli::dispatch(&args(&["flowline", "--config", &cfg])), 0);
    let csv = std::fs::read_to_string(out.join("flowline.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "tau,rho,n,Pi,e,bound_Pi,F");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first.len(), 7);
    assert_eq!(first[0], "0.0");
    // bound_Pi = |Pi0| + 3 Abar = 0.1 + 3.
    let bound: f64 = first[5].parse().unwrap();
    assert!((bound - 3.1).abs() < 1e-5, "bound {bound}");
}

#[test]
fn riemann_check_runs() {
    let dir = workdir("riemann");
    let cfg = write_config(&dir, "shell.cfg", &shell_config(&dir.join("out").to_string_lossy()));
    assert_eq!(misbulk::cli::dispatch(&args(&["riemann-check", "--config", &cfg])), 0);
}
