//! Solves the auxiliary transport equation T F = zeta/tau0 in the
//! (rho, n, Pi) variables by the method of characteristics and verifies the
//! two properties that make it useful: |F| <= eps + Abar everywhere, and
//! dF/dPi < 0 (estimated from neighbouring characteristics).
//!
//!     cargo run --example transport_characteristics

use misbulk::constitutive::{abar_bound, AbarSpec, ConstitutiveSet, TransportFamily};
use misbulk::flowline::{solve_f_characteristic, CharAnchor, CharOptions};

fn main() {
    let set = ConstitutiveSet::ideal_gas(4.0 / 3.0, 0.0)
        .with_transport(TransportFamily::power(1.0, 1.0, 1.0), TransportFamily::Constant(1.0));
    let abar = abar_bound(&set, &AbarSpec::default()).unwrap().value;
    let eps = 1e-3;
    let anchor = CharAnchor { rho0: 1.0, n0: 1.0, pi0: 0.1 };
    let opts = CharOptions::default();
    let sol = solve_f_characteristic(&set, &anchor, eps, (0.05, 20.0), &opts);

    println!("characteristic through (rho, n, Pi) = (1, 1, 0.1), {} samples", sol.samples.len());
    println!("{:>10} {:>10} {:>10} {:>12} {:>12}", "n", "rho", "Pi", "F", "dF/dPi");
    for (i, s) in sol.samples.iter().enumerate().step_by(sol.samples.len() / 10) {
        println!(
            "{:10.4} {:10.4} {:10.5} {:12.6} {:12.3e}",
            s.n, s.rho, s.pi, s.f, sol.dpi_f[i]
        );
    }
    let max_f = sol.samples.iter().map(|s| s.f.abs()).fold(0.0, f64::max);
    let max_d = sol.dpi_f.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    // The residual of the transport equation restricted to the curve:
    // dF/d(log n) must match zeta/tau0 at the samples.
    let mut resid = 0.0f64;
    for i in 1..sol.samples.len() - 1 {
        let d = (sol.samples[i + 1].f - sol.samples[i - 1].f) / (2.0 * opts.log_step);
        resid = resid.max((d - set.zeta_over_tau0(sol.samples[i].rho, sol.samples[i].n)).abs());
    }
    println!("\nsup |F| = {max_f:.6} vs bound eps + Abar = {:.6}", eps + abar);
    println!("max dF/dPi = {max_d:.3e} (negative everywhere)");
    println!("transport residual on the curve = {resid:.2e}");
}
