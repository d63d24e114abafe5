//! Method-of-lines evolution of the bulk-viscous fluid system in 1+1 planar
//! symmetry and in spherical symmetry, with virial diagnostics and
//! breakdown detection.
//!
//! The unknowns per node are (rho, n, Pi, u) with u the single nonzero
//! spatial component of the four-velocity (u^x planar, u^r radial). The
//! spherically symmetric reduction follows from the covariant equations
//! with div u = d_t u^0 + r^-2 d_r(r^2 u^r); only the radial momentum
//! component survives, and the geometric source 2 u^r / r is the sole
//! difference from the planar system. Space is discretized with
//! second-order central differences (plus optional fourth-order
//! dissipation), time with classic RK4.

mod diagnostics;
mod run;

pub use diagnostics::{
    check_finite_propagation, check_q_bounds, diagnostics_row, fill_residuals, DiagnosticsRow,
    FinitePropagation, VirialContext,
};
pub use run::{run, RunSpec, SolutionRun};

use crate::constitutive::ConstitutiveSet;
use crate::shell::ShellData;
use crate::state::{ConstantState, FluidState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GridKind {
    /// x in [-L, L], Dirichlet background at both ends.
    Planar,
    /// r in [0, L], regularity at the origin, Dirichlet background at r = L.
    Radial,
}

/// Uniform node-based grid with `n_cells` intervals (must be even so the
/// diagnostic quadratures can use Simpson weights).
#[derive(Debug, Clone, Copy)]
pub struct Grid1d {
    pub kind: GridKind,
    pub n_cells: usize,
    pub length: f64,
}

impl Grid1d {
    pub fn new(kind: GridKind, n_cells: usize, length: f64) -> Self {
        assert!(n_cells >= 8 && n_cells.is_multiple_of(2), "need an even cell count >= 8");
        assert!(length > 0.0);
        Grid1d { kind, n_cells, length }
    }

    pub fn dx(&self) -> f64 {
        match self.kind {
            GridKind::Planar => 2.0 * self.length / self.n_cells as f64,
            GridKind::Radial => self.length / self.n_cells as f64,
        }
    }

    pub fn x(&self, i: usize) -> f64 {
        match self.kind {
            GridKind::Planar => -self.length + i as f64 * self.dx(),
            GridKind::Radial => i as f64 * self.dx(),
        }
    }

    pub fn n_nodes(&self) -> usize {
        self.n_cells + 1
    }
}

/// Field arrays over the grid nodes at one instant.
#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub t: f64,
    pub rho: Vec<f64>,
    pub n: Vec<f64>,
    pub pi: Vec<f64>,
    pub u: Vec<f64>,
}

impl Snapshot {
    pub fn from_fn<F: Fn(f64) -> FluidState>(grid: &Grid1d, f: F) -> Self {
        let m = grid.n_nodes();
        let mut s = Snapshot {
            t: 0.0,
            rho: Vec::with_capacity(m),
            n: Vec::with_capacity(m),
            pi: Vec::with_capacity(m),
            u: Vec::with_capacity(m),
        };
        for i in 0..m {
            let st = f(grid.x(i));
            s.rho.push(st.rho);
            s.n.push(st.n);
            s.pi.push(st.pi);
            s.u.push(st.u[0]);
        }
        s
    }

    pub fn constant(grid: &Grid1d, bg: &ConstantState) -> Self {
        Snapshot::from_fn(grid, |_| bg.state())
    }

    pub fn state_at(&self, i: usize) -> FluidState {
        FluidState::new_1d(self.rho[i], self.n[i], self.pi[i], self.u[i])
    }

    pub fn is_finite(&self) -> bool {
        self.rho.iter().all(|v| v.is_finite())
            && self.n.iter().all(|v| v.is_finite())
            && self.pi.iter().all(|v| v.is_finite())
            && self.u.iter().all(|v| v.is_finite())
    }
}

/// Builds the initial snapshot for shell data (planar mode mirrors the
/// radial profile with odd velocity).
pub fn snapshot_from_shell(grid: &Grid1d, data: &ShellData, set: &ConstitutiveSet) -> Snapshot {
    Snapshot::from_fn(grid, |x| {
        let r = x.abs();
        let mut st = data.state_at(r, set);
        if x < 0.0 {
            st.u[0] = -st.u[0];
        }
        st
    })
}

/// Discretization parameters.
#[derive(Debug, Clone, Copy)]
pub struct Scheme {
    pub cfl: f64,
    /// Fourth-order dissipation strength (Kreiss-Oliger style); 0 disables.
    pub dissipation: f64,
    /// Freeze Pi at its initial values (perfect-fluid comparison runs).
    pub freeze_pi: bool,
}

impl Default for Scheme {
    fn default() -> Self {
        Scheme { cfl: 0.4, dissipation: 0.5, freeze_pi: false }
    }
}

/// The quasilinear coefficient arrays of the 1+1 barotropic form over
/// Psi = (rho, u1, q): A^0 d_t Psi + A^1 d_x Psi + B = 0, with
/// B = (0, 0, f), f = (Pi + lambda Pi^2)/tau0.
pub fn quasilinear_matrices(
    state: &FluidState,
    set: &ConstitutiveSet,
) -> ([[f64; 3]; 3], [[f64; 3]; 3], [f64; 3]) {
    let rho = state.rho;
    let q = set.pressure(rho, state.n) + state.pi;
    let w = rho + q;
    assert!(w != 0.0, "rho + q = 0: quasilinear form degenerates");
    let c2 = crate::riemann::barotropic_sound_speed_sq(set, rho, state.n, q);
    let u0 = state.u0();
    let u1 = state.u[0];
    let f = (state.pi + set.lambda(rho, state.n) * state.pi * state.pi) / set.tau0(rho, state.n);
    let a0 = [
        [u0, w * u1 / u0, 0.0],
        [0.0, w / u0, u1 / u0],
        [0.0, c2 * w * u1 / u0, u0],
    ];
    let a1 = [
        [u1, w, 0.0],
        [0.0, w * u1 / (u0 * u0), 1.0],
        [0.0, c2 * w, u1],
    ];
    (a0, a1, [0.0, 0.0, f])
}

/// Largest characteristic speed on the snapshot (flow line plus the two
/// acoustic branches with the full viscous sound speed, clamped to [0, 1]
/// for the step-size choice).
pub fn max_char_speed(snap: &Snapshot, set: &ConstitutiveSet) -> f64 {
    let mut worst = 1e-6f64;
    for i in 0..snap.rho.len() {
        let u1 = snap.u[i];
        let u0 = (1.0 + u1 * u1).sqrt();
        let v = u1 / u0;
        let cs2 = set.sound_speed_sq_raw(snap.rho[i], snap.n[i], snap.pi[i]);
        let c = cs2.clamp(0.0, 1.0).sqrt();
        let lp = ((v + c) / (1.0 + v * c)).abs();
        let lm = ((v - c) / (1.0 - v * c)).abs();
        worst = worst.max(v.abs()).max(lp).max(lm);
    }
    worst
}

#[derive(Clone, Copy)]
enum Parity {
    Even,
    Odd,
}

/// Node value with ghost extension: parity reflection through the origin in
/// radial mode, background continuation beyond the outer boundary.
#[inline]
fn ghost(vals: &[f64], i: i64, kind: GridKind, parity: Parity, bg: f64) -> f64 {
    let n_max = vals.len() as i64 - 1;
    if i < 0 {
        match kind {
            GridKind::Radial => {
                let v = vals[(-i) as usize];
                match parity {
                    Parity::Even => v,
                    Parity::Odd => -v,
                }
            }
            GridKind::Planar => bg,
        }
    } else if i > n_max {
        bg
    } else {
        vals[i as usize]
    }
}

struct FieldDerivs {
    rho: Vec<f64>,
    n: Vec<f64>,
    pi: Vec<f64>,
    u: Vec<f64>,
}

impl FieldDerivs {
    fn zeros(m: usize) -> Self {
        FieldDerivs { rho: vec![0.0; m], n: vec![0.0; m], pi: vec![0.0; m], u: vec![0.0; m] }
    }
}

/// Semi-discrete right-hand side. Solves the pointwise 4x4 linear relation
/// between time derivatives analytically: substituting the three scalar
/// rows into the momentum row leaves a single coefficient
/// (e/u0)((u0)^2 - cs2 (u1)^2) for d_t u, positive on physical states.
fn compute_rhs(
    grid: &Grid1d,
    set: &ConstitutiveSet,
    bg: &ConstantState,
    scheme: &Scheme,
    s: &Snapshot,
    out: &mut FieldDerivs,
) {
    let m = grid.n_nodes();
    let dx = grid.dx();
    let kind = grid.kind;
    let p_bg = 0.0; // ghost values per field
    let _ = p_bg;
    let (rho_bg, n_bg, pi_bg, u_bg) = (bg.rho_bar, bg.n_bar, 0.0, 0.0);
    let last = m - 1;
    for i in 0..m {
        // Dirichlet nodes never move.
        let boundary = i == last || (kind == GridKind::Planar && i == 0);
        if boundary {
            out.rho[i] = 0.0;
            out.n[i] = 0.0;
            out.pi[i] = 0.0;
            out.u[i] = 0.0;
            continue;
        }
        let ii = i as i64;
        let d = |vals: &[f64], parity: Parity, bgv: f64| {
            (ghost(vals, ii + 1, kind, parity, bgv) - ghost(vals, ii - 1, kind, parity, bgv))
                / (2.0 * dx)
        };
        let rho = s.rho[i];
        let nn = s.n[i];
        let pi = s.pi[i];
        let u1 = s.u[i];
        let u0 = (1.0 + u1 * u1).sqrt();
        let p = set.pressure(rho, nn);
        let e = rho + p + pi;
        let dpdr = set.dp_drho(rho, nn);
        let dpdn = set.dp_dn(rho, nn);
        let zt = set.zeta_over_tau0(rho, nn);
        let tau0 = set.tau0(rho, nn);
        let lam = set.lambda(rho, nn);
        let cs2 = zt / e + dpdr + nn * dpdn / e;

        let rho_x = d(&s.rho, Parity::Even, rho_bg);
        let n_x = d(&s.n, Parity::Even, n_bg);
        let pi_x = d(&s.pi, Parity::Even, pi_bg);
        let u_x = d(&s.u, Parity::Odd, u_bg);

        // Geometric part of the divergence in spherical symmetry; the
        // origin uses the L'Hopital limit 2 u^r/r -> 2 d_r u^r.
        let geo = match kind {
            GridKind::Planar => 0.0,
            GridKind::Radial => {
                if i == 0 {
                    2.0 * u_x
                } else {
                    2.0 * u1 / grid.x(i)
                }
            }
        };
        let div_sp = u_x + geo;
        let relax = (pi + lam * pi * pi) / tau0;
        let r1 = -(u1 * rho_x + e * div_sp);
        let r2 = -(u1 * n_x + nn * div_sp);
        let r3 = if scheme.freeze_pi { 0.0 } else { -(u1 * pi_x + zt * div_sp + relax) };
        let q_x = dpdr * rho_x + dpdn * n_x + pi_x;
        let r4 = -(e * u1 * u_x + u0 * u0 * q_x);
        let denom = (e / u0) * (u0 * u0 - cs2 * u1 * u1);
        let u_t = (r4 - u1 * (dpdr * r1 + dpdn * r2 + r3)) / denom;
        let a = u1 / u0;
        out.rho[i] = (r1 - e * a * u_t) / u0;
        out.n[i] = (r2 - nn * a * u_t) / u0;
        out.pi[i] = if scheme.freeze_pi { 0.0 } else { (r3 - zt * a * u_t) / u0 };
        out.u[i] = u_t;
    }
    if scheme.dissipation > 0.0 {
        let coef = -scheme.dissipation / (16.0 * dx);
        let d4 = |vals: &[f64], ii: i64, parity: Parity, bgv: f64| {
            ghost(vals, ii - 2, kind, parity, bgv) - 4.0 * ghost(vals, ii - 1, kind, parity, bgv)
                + 6.0 * ghost(vals, ii, kind, parity, bgv)
                - 4.0 * ghost(vals, ii + 1, kind, parity, bgv)
                + ghost(vals, ii + 2, kind, parity, bgv)
        };
        for i in 0..m {
            let boundary = i == last || (kind == GridKind::Planar && i == 0);
            if boundary {
                continue;
            }
            let ii = i as i64;
            out.rho[i] += coef * d4(&s.rho, ii, Parity::Even, rho_bg);
            out.n[i] += coef * d4(&s.n, ii, Parity::Even, n_bg);
            if !scheme.freeze_pi {
                out.pi[i] += coef * d4(&s.pi, ii, Parity::Even, pi_bg);
            }
            out.u[i] += coef * d4(&s.u, ii, Parity::Odd, u_bg);
        }
    }
}

/// One classic RK4 step of size dt. The caller is responsible for the CFL
/// restriction dt <= cfl dx / max_char_speed.
pub fn step(
    grid: &Grid1d,
    set: &ConstitutiveSet,
    bg: &ConstantState,
    scheme: &Scheme,
    snap: &Snapshot,
    dt: f64,
) -> Snapshot {
    let m = grid.n_nodes();
    let mut k1 = FieldDerivs::zeros(m);
    let mut k2 = FieldDerivs::zeros(m);
    let mut k3 = FieldDerivs::zeros(m);
    let mut k4 = FieldDerivs::zeros(m);
    let mut stage = snap.clone();

    compute_rhs(grid, set, bg, scheme, snap, &mut k1);
    stage_from(&mut stage, snap, &k1, 0.5 * dt);
    compute_rhs(grid, set, bg, scheme, &stage, &mut k2);
    stage_from(&mut stage, snap, &k2, 0.5 * dt);
    compute_rhs(grid, set, bg, scheme, &stage, &mut k3);
    stage_from(&mut stage, snap, &k3, dt);
    compute_rhs(grid, set, bg, scheme, &stage, &mut k4);

    let mut out = snap.clone();
    out.t = snap.t + dt;
    let w = dt / 6.0;
    for i in 0..m {
        out.rho[i] += w * (k1.rho[i] + 2.0 * k2.rho[i] + 2.0 * k3.rho[i] + k4.rho[i]);
        out.n[i] += w * (k1.n[i] + 2.0 * k2.n[i] + 2.0 * k3.n[i] + k4.n[i]);
        out.pi[i] += w * (k1.pi[i] + 2.0 * k2.pi[i] + 2.0 * k3.pi[i] + k4.pi[i]);
        out.u[i] += w * (k1.u[i] + 2.0 * k2.u[i] + 2.0 * k3.u[i] + k4.u[i]);
    }
    if grid.kind == GridKind::Radial {
        out.u[0] = 0.0;
    }
    out
}

fn stage_from(stage: &mut Snapshot, base: &Snapshot, k: &FieldDerivs, h: f64) {
    for i in 0..base.rho.len() {
        stage.rho[i] = base.rho[i] + h * k.rho[i];
        stage.n[i] = base.n[i] + h * k.n[i];
        stage.pi[i] = base.pi[i] + h * k.pi[i];
        stage.u[i] = base.u[i] + h * k.u[i];
    }
}

// ---------------------------------------------------------------------------
// Breakdown detection.

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BreakdownCause {
    GradientBlowup,
    LeftPhysicalSet,
    WecViolation,
    PiBoundViolation,
    NumericalFailure,
}

impl std::fmt::Display for BreakdownCause {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            BreakdownCause::GradientBlowup => "gradient_blowup",
            BreakdownCause::LeftPhysicalSet => "left_physical_set",
            BreakdownCause::WecViolation => "wec_violation",
            BreakdownCause::PiBoundViolation => "pi_bound_violation",
            BreakdownCause::NumericalFailure => "numerical_failure",
        };
        write!(out, "{s}")
    }
}

#[derive(Debug, Clone, Copy)]
pub struct BreakdownReport {
    pub time: f64,
    pub cause: BreakdownCause,
    pub cell: usize,
    pub position: f64,
    /// The offending quantity (gradient, slack, e, |Pi| or the bad value).
    pub value: f64,
}

/// Monitor thresholds. The C1 monitors are grid proxies: a finite-difference
/// code cannot observe an infinite norm, only a large multiple of the
/// initial one.
#[derive(Debug, Clone, Copy)]
pub struct Thresholds {
    /// Trigger when any field gradient exceeds this multiple of the largest
    /// initial gradient.
    pub grad_ratio: f64,
    /// Margin delta for leaving the physical set.
    pub physical_margin: f64,
    /// Margin for the weak energy condition e >= -margin.
    pub wec_margin: f64,
    /// Slack added to the a-priori bulk-stress bound.
    pub pi_margin: f64,
    /// Values beyond this magnitude count as leaving every compact set.
    pub value_max: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            grad_ratio: 1e3,
            physical_margin: 1e-6,
            wec_margin: 1e-6,
            pi_margin: 1e-6,
            value_max: 1e6,
        }
    }
}

/// Reference quantities fixed at t = 0.
#[derive(Debug, Clone, Copy)]
pub struct BreakdownRef {
    /// Largest initial gradient over all fields (floored away from zero).
    pub grad0: f64,
    /// |Pi(0)|_inf + 3 Abar when the transport bound is available.
    pub pi_bound: Option<f64>,
}

impl BreakdownRef {
    pub fn from_initial(grid: &Grid1d, snap: &Snapshot, pi_bound: Option<f64>) -> Self {
        let dx = grid.dx();
        let g = max_abs_gradient(&snap.rho, dx)
            .0
            .max(max_abs_gradient(&snap.n, dx).0)
            .max(max_abs_gradient(&snap.pi, dx).0)
            .max(max_abs_gradient(&snap.u, dx).0);
        BreakdownRef { grad0: g.max(1e-10), pi_bound }
    }
}

/// Max |d_x field| with second-order one-sided stencils at the ends.
/// Returns (value, node index).
pub fn max_abs_gradient(vals: &[f64], dx: f64) -> (f64, usize) {
    let m = vals.len();
    let mut best = 0.0f64;
    let mut cell = 0;
    for i in 0..m {
        let g = if i == 0 {
            (-3.0 * vals[0] + 4.0 * vals[1] - vals[2]) / (2.0 * dx)
        } else if i == m - 1 {
            (3.0 * vals[m - 1] - 4.0 * vals[m - 2] + vals[m - 3]) / (2.0 * dx)
        } else {
            (vals[i + 1] - vals[i - 1]) / (2.0 * dx)
        };
        if g.abs() > best {
            best = g.abs();
            cell = i;
        }
    }
    (best, cell)
}

/// Scans a snapshot for breakdown triggers, in priority order:
/// numerical failure, leaving the physical set, WEC violation, a-priori
/// bulk-stress bound violation, gradient blowup.
pub fn detect_breakdown(
    grid: &Grid1d,
    snap: &Snapshot,
    set: &ConstitutiveSet,
    thr: &Thresholds,
    refs: &BreakdownRef,
) -> Option<BreakdownReport> {
    let m = grid.n_nodes();
    let report = |cause, cell: usize, value| {
        Some(BreakdownReport { time: snap.t, cause, cell, position: grid.x(cell), value })
    };
    for i in 0..m {
        let vals = [snap.rho[i], snap.n[i], snap.pi[i], snap.u[i]];
        if vals.iter().any(|v| !v.is_finite()) {
            return report(BreakdownCause::NumericalFailure, i, f64::NAN);
        }
    }
    for i in 0..m {
        let (rho, nn, pi) = (snap.rho[i], snap.n[i], snap.pi[i]);
        let cs2 = set.sound_speed_sq_raw(rho, nn, pi);
        let slack = rho.min(nn).min(cs2).min(1.0 - cs2);
        let escaped = rho.abs() > thr.value_max || nn > thr.value_max || pi.abs() > thr.value_max;
        if slack < thr.physical_margin || !cs2.is_finite() || escaped {
            return report(BreakdownCause::LeftPhysicalSet, i, slack);
        }
    }
    for i in 0..m {
        let e = snap.rho[i] + set.pressure(snap.rho[i], snap.n[i]) + snap.pi[i];
        if e < -thr.wec_margin {
            return report(BreakdownCause::WecViolation, i, e);
        }
    }
    if let Some(bound) = refs.pi_bound {
        for i in 0..m {
            if snap.pi[i].abs() > bound + thr.pi_margin {
                return report(BreakdownCause::PiBoundViolation, i, snap.pi[i].abs());
            }
        }
    }
    let dx = grid.dx();
    let mut worst = (0.0f64, 0usize);
    for vals in [&snap.rho, &snap.n, &snap.pi, &snap.u] {
        let (g, c) = max_abs_gradient(vals, dx);
        if g > worst.0 {
            worst = (g, c);
        }
    }
    if worst.0 >= thr.grad_ratio * refs.grad0 {
        return report(BreakdownCause::GradientBlowup, worst.1, worst.0);
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::TransportFamily;
    use crate::testrng::TestRng;

    fn setup() -> (ConstitutiveSet, ConstantState) {
        let set = ConstitutiveSet::ideal_gas(4.0 / 3.0, 1.8)
            .with_transport(TransportFamily::power(1.0, 1.0, 1.0), TransportFamily::Constant(1.0));
        let bg = ConstantState::new(1.0, 0.5, &set).unwrap();
        (set, bg)
    }

    #[test]
    fn quasilinear_rest_frame_pattern() {
        let set = setup().0;
        let s = FluidState::new_1d(1.0, 0.5, 0.0, 0.0);
        let (a0, a1, b) = quasilinear_matrices(&s, &set);
        let q = set.pressure(1.0, 0.5);
        let w = 1.0 + q;
        // u1 = 0, u0 = 1 collapses A^0 to diag(1, w, 1).
        assert_eq!(a0[0], [1.0, 0.0, 0.0]);
        assert_eq!(a0[1], [0.0, w, 0.0]);
        assert_eq!(a0[2], [0.0, 0.0, 1.0]);
        assert_eq!(a1[0][1], w);
        assert_eq!(b, [0.0, 0.0, 0.0]);
    }

    #[test]
    fn quasilinear_a0_determinant_closed_form() {
        let set = setup().0;
        let mut rng = TestRng::new(5);
        for _ in 0..500 {
            let s = FluidState::new_1d(
                rng.range(0.95, 3.0),
                rng.range(0.2, 1.0),
                rng.range(-0.1, 0.2),
                rng.range(-2.0, 2.0),
            );
            let (a0, _, _) = quasilinear_matrices(&s, &set);
            let det = a0[0][0] * (a0[1][1] * a0[2][2] - a0[1][2] * a0[2][1])
                - a0[0][1] * (a0[1][0] * a0[2][2] - a0[1][2] * a0[2][0])
                + a0[0][2] * (a0[1][0] * a0[2][1] - a0[1][1] * a0[2][0]);
            let q = set.pressure(s.rho, s.n) + s.pi;
            let w = s.rho + q;
            let u0 = s.u0();
            let c2 = crate::riemann::barotropic_sound_speed_sq(&set, s.rho, s.n, q);
            let want = (w / u0) * (u0 * u0 - c2 * s.u[0] * s.u[0]);
            assert!((det - want).abs() < 1e-10 * want.abs().max(1.0), "{det} vs {want}");
            if c2 < 1.0 {
                assert!(det != 0.0);
            }
        }
    }

    #[test]
    fn constant_state_is_equilibrium() {
        let (set, bg) = setup();
        for kind in [GridKind::Planar, GridKind::Radial] {
            let grid = Grid1d::new(kind, 64, 2.0);
            let snap = Snapshot::constant(&grid, &bg);
            let mut s = snap.clone();
            for _ in 0..20 {
                s = step(&grid, &set, &bg, &Scheme::default(), &s, 0.4 * grid.dx());
            }
            for i in 0..grid.n_nodes() {
                assert!((s.rho[i] - bg.rho_bar).abs() < 1e-13);
                assert!((s.n[i] - bg.n_bar).abs() < 1e-13);
                assert!(s.pi[i].abs() < 1e-13);
                assert!(s.u[i].abs() < 1e-13);
            }
        }
    }

    #[test]
    fn smooth_pulse_self_convergence_order() {
        let (set, bg) = setup();
        // Small odd Gaussian velocity pulse away from boundaries (tails at
        // machine precision by the domain ends).
        let pulse = |x: f64| {
            let s = (-((x.abs() - 0.9) / 0.2).powi(2)).exp();
            FluidState::new_1d(bg.rho_bar, bg.n_bar, 0.0, 0.05 * s * x.signum())
        };
        let t_end = 0.2;
        let mut sols = Vec::new();
        for n in [100usize, 200, 400] {
            let grid = Grid1d::new(GridKind::Radial, n, 2.0);
            let mut s = Snapshot::from_fn(&grid, pulse);
            let steps = (n as f64 * t_end / (0.4 * 2.0)).ceil() as usize;
            let dt = t_end / steps as f64;
            for _ in 0..steps {
                s = step(&grid, &set, &bg, &Scheme::default(), &s, dt);
            }
            sols.push((grid, s));
        }
        // Error against the next-finer solution on shared nodes.
        let err = |coarse: &(Grid1d, Snapshot), fine: &(Grid1d, Snapshot)| {
            let mut worst = 0.0f64;
            for i in 0..coarse.0.n_nodes() {
                worst = worst.max((coarse.1.rho[i] - fine.1.rho[2 * i]).abs());
                worst = worst.max((coarse.1.u[i] - fine.1.u[2 * i]).abs());
            }
            worst
        };
        let e1 = err(&sols[0], &sols[1]);
        let e2 = err(&sols[1], &sols[2]);
        let order = (e1 / e2).log2();
        assert!(order >= 1.9, "observed order {order} (errors {e1:e}, {e2:e})");
    }

    #[test]
    fn zero_viscosity_preserves_zero_pi_exactly() {
        let set = ConstitutiveSet::ideal_gas(4.0 / 3.0, 1.8);
        let bg = ConstantState::new(1.0, 0.5, &set).unwrap();
        let grid = Grid1d::new(GridKind::Radial, 128, 2.0);
        let pulse = |r: f64| {
            let s = crate::shell::smooth_bump((r - 0.9) / 0.5);
            FluidState::new_1d(bg.rho_bar, bg.n_bar, 0.0, 0.05 * s)
        };
        let mut s = Snapshot::from_fn(&grid, pulse);
        for _ in 0..50 {
            s = step(&grid, &set, &bg, &Scheme::default(), &s, 0.4 * grid.dx());
        }
        for v in &s.pi {
            assert_eq!(*v, 0.0);
        }
    }

    #[test]
    fn breakdown_detection_cases() {
        let (set, bg) = setup();
        let grid = Grid1d::new(GridKind::Radial, 64, 2.0);
        let snap = Snapshot::constant(&grid, &bg);
        let refs = BreakdownRef::from_initial(&grid, &snap, Some(3.0));
        let thr = Thresholds::default();
        assert!(detect_breakdown(&grid, &snap, &set, &thr, &refs).is_none());

        let mut bad = snap.clone();
        bad.rho[10] = f64::NAN;
        let r = detect_breakdown(&grid, &bad, &set, &thr, &refs).unwrap();
        assert_eq!(r.cause, BreakdownCause::NumericalFailure);

        let mut neg = snap.clone();
        neg.rho[7] = -0.2;
        let r = detect_breakdown(&grid, &neg, &set, &thr, &refs).unwrap();
        assert_eq!(r.cause, BreakdownCause::LeftPhysicalSet);
        assert_eq!(r.cell, 7);

        let mut wec = snap.clone();
        // Strongly negative Pi keeps rho, n positive but can push e < 0 and
        // with it the sound speed out of range; physical-set exit wins by
        // priority.
        wec.pi[5] = -(bg.rho_bar + bg.pressure(&set)) - 0.5;
        let r = detect_breakdown(&grid, &wec, &set, &thr, &refs).unwrap();
        assert!(matches!(
            r.cause,
            BreakdownCause::LeftPhysicalSet | BreakdownCause::WecViolation
        ));

        let mut pib = snap.clone();
        pib.pi[3] = 3.2;
        let r = detect_breakdown(&grid, &pib, &set, &thr, &refs).unwrap();
        assert!(matches!(
            r.cause,
            BreakdownCause::PiBoundViolation | BreakdownCause::LeftPhysicalSet
        ));
    }

    #[test]
    fn gradient_trigger_fires_on_steep_data() {
        let (set, bg) = setup();
        let grid = Grid1d::new(GridKind::Radial, 256, 2.0);
        let smooth = Snapshot::from_fn(&grid, |r| {
            FluidState::new_1d(
                bg.rho_bar + 0.01 * (r * 3.0).sin(),
                bg.n_bar,
                0.0,
                0.0,
            )
        });
        let refs = BreakdownRef::from_initial(&grid, &smooth, None);
        let mut steep = smooth.clone();
        // A near-jump in u of amplitude 0.2 over one cell.
        for i in 0..grid.n_nodes() {
            steep.u[i] = if grid.x(i) > 1.0 { 0.0 } else { 0.2 };
        }
        steep.u[0] = 0.0;
        let r = detect_breakdown(&grid, &steep, &set, &Thresholds::default(), &refs).unwrap();
        assert_eq!(r.cause, BreakdownCause::GradientBlowup);
    }
}
