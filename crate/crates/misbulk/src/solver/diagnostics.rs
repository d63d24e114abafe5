//! Virial diagnostics for spherically symmetric runs.
//!
//! All volume integrals are 4 pi int r^2 (.) dr quadratures over the grid
//! (composite Simpson). The virial identity d^2I/dt^2 = T_kin +
//! 3 int (p + Pi - p_bar) dx and dI/dt = Q are monitored through finite
//! differences of the stored moment history; the residual columns lag one
//! output step (centered at the previous row), so the first two rows of a
//! run carry no residuals.

use super::{max_abs_gradient, Grid1d, GridKind, Snapshot};
use crate::constitutive::ConstitutiveSet;
use crate::state::ConstantState;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Background and envelope constants the diagnostics need.
#[derive(Debug, Clone, Copy)]
pub struct VirialContext {
    pub rho_bar: f64,
    pub n_bar: f64,
    pub p_bar: f64,
    /// Envelope constant entering z = Q / (R (E + b R^3)).
    pub b: f64,
    /// Background sound speed; R(t) = r0 + c t.
    pub c: f64,
    pub r0: f64,
}

impl VirialContext {
    pub fn radius_at(&self, t: f64) -> f64 {
        self.r0 + self.c * t
    }
}

#[derive(Debug, Clone, Copy)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub e: f64,
    /// Second moment I = (1/2) int |x|^2 (T^00 - rho_bar) dx.
    pub moment: f64,
    pub q: f64,
    pub t_kin: f64,
    /// 3 int (p + Pi - p_bar) dx; feeds the virial residual.
    pub pressure_integral: f64,
    pub virial_residual: Option<f64>,
    pub idot_minus_q: Option<f64>,
    pub max_grad_u: f64,
    pub min_cs2: f64,
    pub max_cs2: f64,
    pub min_e: f64,
    pub max_abs_pi: f64,
    /// Outermost radius where the state deviates from the background.
    pub support_radius: f64,
    pub z: f64,
}

fn simpson(vals: &[f64], dx: f64) -> f64 {
    let n = vals.len() - 1;
    debug_assert!(n.is_multiple_of(2), "Simpson needs an even interval count");
    let mut acc = vals[0] + vals[n];
    for (i, v) in vals.iter().enumerate().take(n).skip(1) {
        acc += v * if i % 2 == 1 { 4.0 } else { 2.0 };
    }
    acc * dx / 3.0
}

/// Builds one diagnostics row. `e0` is the conserved energy used in the
/// normalization of z; pass the row-zero value (or the freshly computed E
/// for the first row). Virial columns are meaningful in radial mode only
/// and are NaN on planar grids.
pub fn diagnostics_row(
    grid: &Grid1d,
    snap: &Snapshot,
    set: &ConstitutiveSet,
    ctx: &VirialContext,
    e0: Option<f64>,
    support_tol: f64,
) -> DiagnosticsRow {
    let m = grid.n_nodes();
    let mut min_cs2 = f64::INFINITY;
    let mut max_cs2 = f64::NEG_INFINITY;
    let mut min_e = f64::INFINITY;
    let mut max_abs_pi = 0.0f64;
    let mut support_radius = 0.0f64;
    for i in 0..m {
        let (rho, nn, pi, u1) = (snap.rho[i], snap.n[i], snap.pi[i], snap.u[i]);
        let cs2 = set.sound_speed_sq_raw(rho, nn, pi);
        min_cs2 = min_cs2.min(cs2);
        max_cs2 = max_cs2.max(cs2);
        min_e = min_e.min(rho + set.pressure(rho, nn) + pi);
        max_abs_pi = max_abs_pi.max(pi.abs());
        let dev = (rho - ctx.rho_bar)
            .abs()
            .max((nn - ctx.n_bar).abs())
            .max(pi.abs())
            .max(u1.abs());
        if dev > support_tol {
            support_radius = support_radius.max(grid.x(i).abs());
        }
    }
    let (max_grad_u, _) = max_abs_gradient(&snap.u, grid.dx());

    let (e, moment, q, t_kin, pressure_integral, z) = if grid.kind == GridKind::Radial {
        let mut f_e = Vec::with_capacity(m);
        let mut f_i = Vec::with_capacity(m);
        let mut f_q = Vec::with_capacity(m);
        let mut f_t = Vec::with_capacity(m);
        let mut f_p = Vec::with_capacity(m);
        for i in 0..m {
            let r = grid.x(i);
            let (rho, nn, pi, u1) = (snap.rho[i], snap.n[i], snap.pi[i], snap.u[i]);
            let p = set.pressure(rho, nn);
            let qq = p + pi;
            let ee = rho + qq;
            let u0sq = 1.0 + u1 * u1;
            let t00 = ee * u0sq - qq;
            let r2 = r * r;
            f_e.push(FOUR_PI * r2 * (t00 - ctx.rho_bar));
            f_i.push(0.5 * FOUR_PI * r2 * r2 * (t00 - ctx.rho_bar));
            f_q.push(FOUR_PI * r2 * r * u1 * u0sq.sqrt() * ee);
            f_t.push(FOUR_PI * r2 * ee * u1 * u1);
            f_p.push(3.0 * FOUR_PI * r2 * (qq - ctx.p_bar));
        }
        let dx = grid.dx();
        let e = simpson(&f_e, dx);
        let moment = simpson(&f_i, dx);
        let q = simpson(&f_q, dx);
        let t_kin = simpson(&f_t, dx);
        let pint = simpson(&f_p, dx);
        let radius = ctx.radius_at(snap.t);
        let e_ref = e0.unwrap_or(e);
        let z = q / (radius * (e_ref + ctx.b * radius.powi(3)));
        (e, moment, q, t_kin, pint, z)
    } else {
        (f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN, f64::NAN)
    };

    DiagnosticsRow {
        t: snap.t,
        e,
        moment,
        q,
        t_kin,
        pressure_integral,
        virial_residual: None,
        idot_minus_q: None,
        max_grad_u,
        min_cs2,
        max_cs2,
        min_e,
        max_abs_pi,
        support_radius,
        z,
    }
}

/// Fills the lagged finite-difference residual columns over a uniformly
/// spaced row history: row k compares the derivative centered at row k-1
/// against the stored integrals there.
pub fn fill_residuals(rows: &mut [DiagnosticsRow], dt_out: f64) {
    for k in 2..rows.len() {
        let d2i = (rows[k].moment - 2.0 * rows[k - 1].moment + rows[k - 2].moment) / (dt_out * dt_out);
        let rhs = rows[k - 1].t_kin + rows[k - 1].pressure_integral;
        rows[k].virial_residual = Some((d2i - rhs).abs());
        let idot = (rows[k].moment - rows[k - 2].moment) / (2.0 * dt_out);
        rows[k].idot_minus_q = Some((idot - rows[k - 1].q).abs());
    }
}

/// The two a-priori bounds on Q, checked with a relative tolerance on each
/// bound's natural scale: Q^2 <= R^2 (2(E + bR^3) - T) T and
/// |Q| <= R (E + bR^3).
pub fn check_q_bounds(row: &DiagnosticsRow, b: f64, radius: f64, e0: f64, tol_rel: f64) -> bool {
    let envelope = e0 + b * radius.powi(3);
    let first_rhs = radius * radius * (2.0 * envelope - row.t_kin) * row.t_kin;
    let first_scale = (radius * envelope).powi(2);
    let second_rhs = radius * envelope;
    row.q * row.q <= first_rhs + tol_rel * first_scale
        && row.q.abs() <= second_rhs + tol_rel * second_rhs.abs()
}

#[derive(Debug, Clone, Copy)]
pub struct FinitePropagation {
    pub max_deviation: f64,
    pub pass: bool,
    pub worst_cell: usize,
}

/// Sup-norm deviation from the background outside the causal ball
/// |x| <= r0 + c t.
pub fn check_finite_propagation(
    grid: &Grid1d,
    snap: &Snapshot,
    bg: &ConstantState,
    r0: f64,
    c: f64,
    tol: f64,
) -> FinitePropagation {
    let radius = r0 + c * snap.t;
    let mut max_deviation = 0.0f64;
    let mut worst_cell = 0;
    for i in 0..grid.n_nodes() {
        if grid.x(i).abs() <= radius {
            continue;
        }
        let dev = (snap.rho[i] - bg.rho_bar)
            .abs()
            .max((snap.n[i] - bg.n_bar).abs())
            .max(snap.pi[i].abs())
            .max(snap.u[i].abs());
        if dev > max_deviation {
            max_deviation = dev;
            worst_cell = i;
        }
    }
    FinitePropagation { max_deviation, pass: max_deviation <= tol, worst_cell }
}
