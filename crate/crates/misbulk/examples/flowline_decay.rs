//! Integrates the comoving (rho, n, Pi) system along one flow line under a
//! prescribed expansion scalar theta(tau) and monitors the two a-priori
//! statements: the weak energy condition propagates, and |Pi| never exceeds
//! |Pi(0)| + 3 Abar.
//!
//!     cargo run --example flowline_decay

use misbulk::constitutive::{abar_bound, AbarSpec, ConstitutiveSet, TransportFamily};
use misbulk::flowline::{integrate_flowline, pi_bound, wec_propagation_check, FlowlineOptions};
use misbulk::state::FluidState;

fn main() {
    let set = ConstitutiveSet::ideal_gas(4.0 / 3.0, 0.0)
        .with_transport(TransportFamily::power(1.0, 1.0, 1.0), TransportFamily::Constant(1.0));
    let abar = abar_bound(&set, &AbarSpec::default()).unwrap().value;
    let state0 = FluidState::new_1d(1.0, 1.0, 0.2, 0.0);
    let bound = pi_bound(state0.pi, abar);

    // Oscillating expansion: alternating compression and rarefaction.
    let theta = |tau: f64| 0.8 * (3.0 * tau).sin();
    let path = integrate_flowline(&state0, &set, &theta, 4.0, &FlowlineOptions::default());

    println!("{:>8} {:>10} {:>10} {:>10} {:>10}", "tau", "rho", "n", "Pi", "e");
    for s in path.samples.iter().step_by(path.samples.len() / 12) {
        println!("{:8.3} {:10.5} {:10.5} {:10.5} {:10.5}", s.tau, s.rho, s.n, s.pi, s.e);
    }
    let wec = wec_propagation_check(&path, 1e-10);
    println!("\noutcome: {:?}", path.outcome);
    println!("min e along the line  = {:.3e}  (WEC holds: {})", wec.min_e, wec.holds);
    println!("max |Pi| along line   = {:.5}", path.max_abs_pi());
    println!("a-priori bound        = |Pi(0)| + 3 Abar = {bound:.5}");
}
