//! Certifies a shell and then evolves it in spherical symmetry until the
//! breakdown monitor fires, printing the virial diagnostics along the way.
//! The detected time always lands below the certificate's T_upper.
//!
//!     cargo run --release --example simulate_breakdown

use misbulk::certifier::{find_sigma0, CertifySpec};
use misbulk::constitutive::{AbarSpec, ConstitutiveSet, TransportFamily};
use misbulk::flowline::pi_bound;
use misbulk::shell::ShellData;
use misbulk::solver::{
    check_q_bounds, run, snapshot_from_shell, Grid1d, GridKind, RunSpec, Scheme, VirialContext,
};
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
    let search = find_sigma0(&template, &set, (1.0, 2.0_f64.powi(20)), &spec).unwrap();
    let cert = &search.certificate;
    println!("certified amplitude sigma0 = {:.3}, T_upper = {:.4}", search.sigma0, cert.t_upper);

    let data = template.with_sigma(search.sigma0);
    let grid = Grid1d::new(GridKind::Radial, 1000, 2.0);
    let init = snapshot_from_shell(&grid, &data, &set);
    let ctx = VirialContext {
        rho_bar: bg.rho_bar,
        n_bar: bg.n_bar,
        p_bar: bg.pressure(&set),
        b: cert.b,
        c: cert.c,
        r0: cert.r0,
    };
    let rspec = RunSpec {
        t_max: 0.05,
        out_interval: 2e-4,
        scheme: Scheme::default(),
        pi_bound: Some(pi_bound(0.0, cert.abar)),
        ..Default::default()
    };
    let sol = run(&grid, &set, &bg, init, &ctx, &rspec);

    println!("{:>9} {:>12} {:>12} {:>10} {:>9}", "t", "Q", "T_kin", "z", "max|du|");
    for row in &sol.rows {
        println!(
            "{:9.5} {:12.2} {:12.2} {:10.6} {:9.2e}",
            row.t, row.q, row.t_kin, row.z, row.max_grad_u
        );
    }
    let e0 = sol.rows[0].e;
    let q_ok = sol
        .rows
        .iter()
        .all(|r| check_q_bounds(r, ctx.b, ctx.radius_at(r.t), e0, 1e-6));
    println!("\nQ bounds hold on every row: {q_ok}");
    println!("energy drift: {:.2e}, leak outside causal ball: {:.2e}", sol.e_drift, sol.max_leak);
    match &sol.breakdown {
        Some(b) => println!(
            "breakdown: cause = {}, t* = {:.5} (T_upper = {:.4}), at r = {:.4}",
            b.cause, b.time, cert.t_upper, b.position
        ),
        None => println!("no breakdown before t_max"),
    }
}
