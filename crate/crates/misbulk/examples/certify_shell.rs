//! Builds shell initial data (an outward-moving mollified velocity shell on
//! a constant background) and assembles its breakdown certificate: the
//! conserved energy, the envelope constants, the comparison radius, and the
//! three sufficient inequalities. A valid certificate bounds the lifetime
//! of the smooth admissible evolution by T_upper = (Rbar - R0)/c.
//!
//!     cargo run --example certify_shell

use misbulk::certifier::{certify, CertifySpec};
use misbulk::constitutive::{AbarSpec, ConstitutiveSet, TransportFamily};
use misbulk::shell::ShellData;
use misbulk::state::ConstantState;

fn main() {
    let set = ConstitutiveSet::ideal_gas(4.0 / 3.0, 1.95)
        .with_transport(TransportFamily::power(1.0, 1.0, 1.0), TransportFamily::Constant(1.0));
    let bg = ConstantState::new(1.0, 0.5, &set).unwrap();
    let data = ShellData::new(1.0, 0.1, 180.0, 0.04, bg)
        .unwrap()
        .with_standoff(0.02)
        .unwrap();
    let spec = CertifySpec { abar: AbarSpec::for_background(1.0), ..Default::default() };
    let cert = certify(&data, &set, &spec);

    println!("background sound speed c = {:.6}", cert.c);
    println!("shell ratio {:.6} vs threshold {:.6}", cert.ratio, cert.threshold);
    println!("Abar = {:.6}, b = {:.4}, k = {:.4}", cert.abar, cert.b, cert.k);
    println!("E = {:.3}, Q0 = {:.3}, T_kin(0) = {:.3}", cert.e0, cert.q0, cert.t_kin0);
    println!(
        "mu = {:.4}, Rbar = {:.4}, A = {:.5}, B = {:.5}, z0 = {:?}",
        cert.mu, cert.rbar, cert.a_coef, cert.b_coef, cert.z0
    );
    println!("cond1 = {}, cond2 = {}, cond3 = {}", cert.cond1, cert.cond2, cert.cond3);
    if cert.valid {
        println!(
            "certificate VALID: smooth admissible evolution cannot pass t = {:.4}",
            cert.t_upper
        );
    } else {
        println!("certificate INVALID:");
        for r in &cert.reasons {
            println!("  - {r}");
        }
    }
    println!("\nmachine-readable form:\n{}", cert.to_key_values());
}
