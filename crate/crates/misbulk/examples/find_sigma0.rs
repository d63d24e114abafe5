//! Searches for the smallest velocity amplitude sigma whose shell data
//! certify: a doubling sweep followed by geometric bisection to 1% relative
//! accuracy. Certifiability is not assumed monotone; the probe grid is
//! printed alongside the result.
//!
//!     cargo run --example find_sigma0

use misbulk::certifier::{find_sigma0, CertifySpec};
use misbulk::constitutive::{AbarSpec, ConstitutiveSet, TransportFamily};
use misbulk::shell::ShellData;
use misbulk::state::ConstantState;

fn main() {
    let set = ConstitutiveSet::ideal_gas(4.0 / 3.0, 1.95)
        .with_transport(TransportFamily::power(1.0, 1.0, 1.0), TransportFamily::Constant(1.0));
    let bg = ConstantState::new(1.0, 0.5, &set).unwrap();
    let template = ShellData::new(1.0, 0.1, 1.0, 0.04, bg)
        .unwrap()
        .with_standoff(0.02)
        .unwrap();
    let spec = CertifySpec { abar: AbarSpec::for_background(1.0), ..Default::default() };

    match find_sigma0(&template, &set, (1.0, 2.0_f64.powi(20)), &spec) {
        Ok(search) => {
            println!("probe grid:");
            for (sigma, ok) in &search.sweep {
                println!("  sigma = {sigma:<12.4} certified = {ok}");
            }
            println!("\nsigma0 = {:.4}", search.sigma0);
            println!(
                "certificate: valid = {}, E = {:.2}, T_upper = {:.4}",
                search.certificate.valid, search.certificate.e0, search.certificate.t_upper
            );
        }
        Err(nf) => {
            println!("no certified amplitude found ({} probes):", nf.sweep.len());
            for r in &nf.last_reasons {
                println!("  - {r}");
            }
        }
    }
}
