//! Shared helpers for the integration suites: a deterministic RNG
//! (splitmix64) and the desk-scale certified-shell configuration.

// Each integration test binary compiles this module separately and uses
// its own subset of the helpers.
#![allow(dead_code)]

use misbulk::certifier::{find_sigma0, CertifySpec, SigmaSearch};
use misbulk::constitutive::{AbarSpec, ConstitutiveSet, TransportFamily};
use misbulk::shell::ShellData;
use misbulk::state::ConstantState;

pub struct TestRng(u64);

impl TestRng {
    pub fn new(seed: u64) -> Self {
        TestRng(seed)
    }

    pub fn next_u64(&mut self) -> u64 {
        self.0 = self.0.wrapping_add(0x9e3779b97f4a7c15);
        let mut z = self.0;
        z = (z ^ (z >> 30)).wrapping_mul(0xbf58476d1ce4e5b9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94d049bb133111eb);
        z ^ (z >> 31)
    }

    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 / (1u64 << 53) as f64
    }

    pub fn range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.uniform()
    }
}

/// The constitutive set of the desk-scale breakdown study: ideal gas with
/// gamma_ad = 4/3, zeta/tau0 = n exp(-n).
pub fn acceptance_set() -> ConstitutiveSet {
    ConstitutiveSet::ideal_gas(4.0 / 3.0, 1.95)
        .with_transport(TransportFamily::power(1.0, 1.0, 1.0), TransportFamily::Constant(1.0))
}

pub fn acceptance_background(set: &ConstitutiveSet) -> ConstantState {
    ConstantState::new(1.0, 0.5, set).unwrap()
}

/// Shell template for the certification study (amplitude filled in by the
/// search).
pub fn acceptance_shell(set: &ConstitutiveSet) -> ShellData {
    let bg = acceptance_background(set);
    ShellData::new(1.0, 0.1, 1.0, 0.04, bg).unwrap().with_standoff(0.02).unwrap()
}

pub fn acceptance_certify_spec() -> CertifySpec {
    CertifySpec { abar: AbarSpec::for_background(1.0), ..Default::default() }
}

pub fn certified_search() -> SigmaSearch {
    let set = acceptance_set();
    let data = acceptance_shell(&set);
    find_sigma0(&data, &set, (1.0, 2.0_f64.powi(20)), &acceptance_certify_spec())
        .expect("certified amplitude exists")
}
