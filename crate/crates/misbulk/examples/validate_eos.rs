//! Checks the structural assumptions on a constitutive set: pressure
//! window and slopes, transport positivity/monotonicity, the relaxation
//! floor, the nonlinear coefficient bound, and the integrability of
//! zeta/tau0 that feeds the a-priori bulk-stress bound.
//!
//!     cargo run --example validate_eos

use misbulk::constitutive::{
    abar_bound, validate_assumptions, AbarSpec, ConstitutiveSet, SampleSpec, TransportFamily,
};

fn report(name: &str, set: &ConstitutiveSet) {
    let spec = SampleSpec::default();
    let rep = validate_assumptions(set, &spec);
    println!("== {name}");
    println!(
        "   sampled {} points ({} physical), {} violation(s)",
        rep.total_samples,
        rep.physical_samples,
        rep.violations.len()
    );
    for v in rep.violations.iter().take(3) {
        println!("   [{}] at rho={:.3}, n={:.3}: {}", v.check, v.rho, v.n, v.detail);
    }
    match abar_bound(set, &AbarSpec::default()) {
        Ok(est) => println!("   transport bound Abar = {:.9} (err {:.1e})", est.value, est.quad_error),
        Err(e) => println!("   transport bound unavailable: {e}"),
    }
}

fn main() {
    // Fully compliant: ideal gas with zeta/tau0 = n exp(-n).
    let good = ConstitutiveSet::ideal_gas(4.0 / 3.0, 1.0)
        .with_transport(TransportFamily::power(1.0, 1.0, 1.0), TransportFamily::Constant(1.0));
    report("ideal gas + integrable bulk viscosity", &good);

    // tau0 = n has no positive floor as n -> 0.
    let mut no_floor = ConstitutiveSet::ideal_gas(2.0, 1.0);
    no_floor.tau0 = TransportFamily::power(1.0, 1.0, 0.0);
    no_floor.tau0_floor = 0.05;
    report("relaxation time without a floor", &no_floor);

    // Constant zeta/tau0: the half-line integral diverges at both ends.
    let divergent = ConstitutiveSet::ideal_gas(4.0 / 3.0, 0.5)
        .with_transport(TransportFamily::Constant(1.0), TransportFamily::Constant(1.0));
    report("constant zeta/tau0 (non-integrable)", &divergent);
}
