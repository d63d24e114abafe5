//! Output-driven run loop: CFL-limited substeps between uniformly spaced
//! diagnostics rows, with breakdown monitoring and causal-leak tracking.

use super::diagnostics::{
    check_finite_propagation, diagnostics_row, fill_residuals, DiagnosticsRow, VirialContext,
};
use super::{
    detect_breakdown, max_char_speed, step, BreakdownRef, BreakdownReport, Grid1d, Scheme,
    Snapshot, Thresholds,
};
use crate::constitutive::ConstitutiveSet;
use crate::state::ConstantState;

#[derive(Debug, Clone, Copy)]
pub struct RunSpec {
    pub t_max: f64,
    /// Spacing of diagnostics rows (and the granularity of breakdown times).
    pub out_interval: f64,
    pub scheme: Scheme,
    pub thresholds: Thresholds,
    /// Deviation threshold for the support-radius column.
    pub support_tol: f64,
    /// Tolerance for deviations outside the causal ball.
    pub leak_tol: f64,
    /// Keep a snapshot every this many rows (0 = none beyond the final one).
    pub snapshot_every: usize,
    pub stop_on_breakdown: bool,
    /// A-priori bulk-stress bound |Pi(0)|_inf + 3 Abar, when available.
    pub pi_bound: Option<f64>,
}

impl Default for RunSpec {
    fn default() -> Self {
        RunSpec {
            t_max: 1.0,
            out_interval: 1e-2,
            scheme: Scheme::default(),
            thresholds: Thresholds::default(),
            support_tol: 1e-6,
            leak_tol: 1e-6,
            snapshot_every: 0,
            stop_on_breakdown: true,
            pi_bound: None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SolutionRun {
    pub rows: Vec<DiagnosticsRow>,
    pub breakdown: Option<BreakdownReport>,
    /// (row index, snapshot) pairs kept per `snapshot_every`.
    pub snapshots: Vec<(usize, Snapshot)>,
    pub final_snapshot: Snapshot,
    /// Largest deviation outside the causal ball seen before breakdown.
    pub max_leak: f64,
    /// max_k |E_k - E_0| / max(1, |E_0|) over the rows before breakdown.
    pub e_drift: f64,
}

/// Evolves `init` until `t_max` or breakdown. Rows land on exact multiples
/// of the output interval; substeps within an interval share a uniform size
/// chosen from the CFL bound at the interval start.
pub fn run(
    grid: &Grid1d,
    set: &ConstitutiveSet,
    bg: &ConstantState,
    init: Snapshot,
    ctx: &VirialContext,
    spec: &RunSpec,
) -> SolutionRun {
    assert!(spec.t_max > 0.0 && spec.out_interval > 0.0);
    let refs = BreakdownRef::from_initial(grid, &init, spec.pi_bound);
    let n_rows = (spec.t_max / spec.out_interval).round().max(1.0) as usize;
    let mut snap = init;
    snap.t = 0.0;
    let mut rows = Vec::with_capacity(n_rows + 1);
    let first = diagnostics_row(grid, &snap, set, ctx, None, spec.support_tol);
    let e0 = first.e;
    rows.push(first);
    let mut snapshots = Vec::new();
    if spec.snapshot_every > 0 {
        snapshots.push((0usize, snap.clone()));
    }
    let mut breakdown = detect_breakdown(grid, &snap, set, &spec.thresholds, &refs);
    let mut max_leak = check_finite_propagation(grid, &snap, bg, ctx.r0, ctx.c, spec.leak_tol)
        .max_deviation;

    if breakdown.is_none() || !spec.stop_on_breakdown {
        'outer: for k in 1..=n_rows {
            let t_target = k as f64 * spec.out_interval;
            let speed = max_char_speed(&snap, set);
            let dt_cfl = spec.scheme.cfl * grid.dx() / speed;
            let nsub = ((spec.out_interval / dt_cfl).ceil() as usize).max(1);
            let dt = spec.out_interval / nsub as f64;
            for _ in 0..nsub {
                snap = step(grid, set, bg, &spec.scheme, &snap, dt);
                if !snap.is_finite() {
                    break;
                }
            }
            snap.t = t_target;
            let row = diagnostics_row(grid, &snap, set, ctx, Some(e0), spec.support_tol);
            rows.push(row);
            if spec.snapshot_every > 0 && k % spec.snapshot_every == 0 {
                snapshots.push((k, snap.clone()));
            }
            if breakdown.is_none() {
                breakdown = detect_breakdown(grid, &snap, set, &spec.thresholds, &refs);
                if breakdown.is_none() {
                    let fp =
                        check_finite_propagation(grid, &snap, bg, ctx.r0, ctx.c, spec.leak_tol);
                    max_leak = max_leak.max(fp.max_deviation);
                }
            }
            if breakdown.is_some() && spec.stop_on_breakdown {
                break 'outer;
            }
        }
    }
    fill_residuals(&mut rows, spec.out_interval);
    let pre_breakdown_rows = match &breakdown {
        Some(b) => rows.iter().filter(|r| r.t < b.time).count().max(1),
        None => rows.len(),
    };
    let e_drift = rows[..pre_breakdown_rows]
        .iter()
        .map(|r| (r.e - e0).abs() / e0.abs().max(1.0))
        .fold(0.0, f64::max);
    SolutionRun { rows, breakdown, snapshots, final_snapshot: snap, max_leak, e_drift }
}
