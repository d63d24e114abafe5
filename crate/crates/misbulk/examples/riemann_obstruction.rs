//! The 1+1 characteristic analysis in Psi = (rho, u1, q): eigenvalues and
//! left eigenvectors of the quasilinear system, and the obstruction that
//! rules out Riemann invariants unless the pressure is constant.
//!
//!     cargo run --example riemann_obstruction

use misbulk::constitutive::{ConstitutiveSet, EosFamily, LambdaFamily, TransportFamily};
use misbulk::riemann::{
    curl_obstruction, eigen_residual, eigensystem, necessary_condition_residual,
};
use misbulk::state::FluidState;

fn main() {
    // Barotropic set: p = rho/3 with constant zeta, tau0.
    let set = ConstitutiveSet {
        eos: EosFamily::Linear { c_rho: 1.0 / 3.0, c_n: 0.0, offset: 0.0 },
        zeta: TransportFamily::Constant(0.1),
        tau0: TransportFamily::Constant(1.0),
        lambda: LambdaFamily::Zero,
        p0: 0.0,
        p1: 0.0,
        tau0_floor: 1.0,
    };

    println!("{:>7} {:>7} {:>10} {:>10} {:>10} {:>11}", "rho", "u1", "lambda1", "lambda2", "lambda3", "eig resid");
    let mut grid = Vec::new();
    for i in 0..5 {
        for j in 0..5 {
            let s = FluidState::new_1d(0.6 + 0.5 * i as f64, 1.0, 0.05, -1.0 + 0.5 * j as f64);
            let e = eigensystem(&s, &set);
            if j == 2 {
                println!(
                    "{:7.2} {:7.2} {:10.5} {:10.5} {:10.5} {:11.2e}",
                    s.rho,
                    s.u[0],
                    e.lambdas[0],
                    e.lambdas[1],
                    e.lambdas[2],
                    eigen_residual(&s, &set)
                );
            }
            grid.push(s);
        }
    }

    let s = &grid[12];
    let q = set.pressure(s.rho, s.n) + s.pi;
    let nc = necessary_condition_residual(&set, s.rho, s.n, q).unwrap();
    println!("\nnecessary-condition residual at a generic state: {nc:.5}");
    println!("(Riemann invariants would force it to vanish identically)");
    let defect = curl_obstruction(&set, &grid);
    println!("curl integrability defect over the grid: {defect:.5}");

    // The only family that clears the obstruction: constant pressure with
    // no viscosity, where the whole acoustic structure degenerates.
    let degenerate = ConstitutiveSet {
        eos: EosFamily::Linear { c_rho: 0.0, c_n: 0.0, offset: 0.1 },
        zeta: TransportFamily::Zero,
        ..set
    };
    println!(
        "degenerate family (p constant, zeta = 0): defect = {}",
        curl_obstruction(&degenerate, &grid)
    );
}
