//! Lagrangian dynamics along flow lines.
//!
//! With a prescribed expansion scalar theta(tau) = div u, the comoving
//! evolution closes to the ODE system
//!
//! ```text
//! dn/dtau   = -n theta
//! drho/dtau = (rho + p + Pi) dn/dtau / n
//! dPi/dtau  = (zeta / (tau0 n)) dn/dtau - (1 + lambda Pi) Pi / tau0
//! ```
//!
//! The module also solves the auxiliary transport equation T F = zeta/tau0
//! in the (rho, n, Pi) variables by the method of characteristics; the
//! boundedness of F is what turns into the a-priori bound
//! |Pi(tau)| <= |Pi(0)| + 3 Abar.

use crate::constitutive::ConstitutiveSet;
use crate::ode::{self, OdeOptions, OdeOutcome};
use crate::state::FluidState;

/// Prescribed expansion scalar along a flow line.
pub type ThetaFn<'a> = dyn Fn(f64) -> f64 + 'a;

#[derive(Debug, Clone, Copy)]
pub struct FlowlineOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Hard cap on the internal step (useful when samples feed finite
    /// differences); infinite by default.
    pub max_step: f64,
    /// Integration stops (flagged, not an error) when n falls below
    /// `n_floor_rel * n(0)`.
    pub n_floor_rel: f64,
}

impl Default for FlowlineOptions {
    fn default() -> Self {
        FlowlineOptions { rtol: 1e-9, atol: 1e-12, max_step: f64::INFINITY, n_floor_rel: 1e-12 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FlowlineOutcome {
    Completed,
    /// n reached the declared floor at the recorded proper time.
    FloorStop { tau: f64 },
    /// Step-size collapse; last good proper time recorded.
    StiffFailure { tau: f64 },
}

#[derive(Debug, Clone, Copy)]
pub struct FlowlineSample {
    pub tau: f64,
    pub rho: f64,
    pub n: f64,
    pub pi: f64,
    /// rho + p + Pi at the sample.
    pub e: f64,
}

/// Accepted samples of one flow line.
#[derive(Debug, Clone)]
pub struct FlowlinePath {
    pub samples: Vec<FlowlineSample>,
    pub outcome: FlowlineOutcome,
}

impl FlowlinePath {
    pub fn min_e(&self) -> f64 {
        self.samples.iter().map(|s| s.e).fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs_pi(&self) -> f64 {
        self.samples.iter().map(|s| s.pi.abs()).fold(0.0, f64::max)
    }
}

/// Integrates one flow line with adaptive error control.
pub fn integrate_flowline(
    state0: &FluidState,
    set: &ConstitutiveSet,
    theta: &ThetaFn,
    tau_max: f64,
    opts: &FlowlineOptions,
) -> FlowlinePath {
    assert!(state0.n > 0.0, "flow lines need n(0) > 0");
    let n_floor = opts.n_floor_rel * state0.n;
    let rhs = |tau: f64, y: &[f64], dy: &mut [f64]| {
        let (rho, n, pi) = (y[0], y[1], y[2]);
        let th = theta(tau);
        let e = rho + set.pressure(rho, n) + pi;
        let tau0 = set.tau0(rho, n);
        dy[0] = -e * th;
        dy[1] = -n * th;
        dy[2] = -set.zeta_over_tau0(rho, n) * th - (1.0 + set.lambda(rho, n) * pi) * pi / tau0;
    };
    let ode_opts = OdeOptions {
        rtol: opts.rtol,
        atol: opts.atol,
        max_step: opts.max_step,
        ..Default::default()
    };
    let path = ode::integrate_adaptive(
        rhs,
        0.0,
        tau_max,
        &[state0.rho, state0.n, state0.pi],
        &ode_opts,
        |_, y| y[1] <= n_floor,
    );
    let samples = path
        .ts
        .iter()
        .zip(path.ys.iter())
        .map(|(&tau, y)| FlowlineSample {
            tau,
            rho: y[0],
            n: y[1],
            pi: y[2],
            e: y[0] + set.pressure(y[0], y[1]) + y[2],
        })
        .collect();
    let outcome = match path.outcome {
        OdeOutcome::Completed => FlowlineOutcome::Completed,
        OdeOutcome::StoppedEarly { t } => FlowlineOutcome::FloorStop { tau: t },
        OdeOutcome::StiffFailure { t } => FlowlineOutcome::StiffFailure { tau: t },
    };
    FlowlinePath { samples, outcome }
}

/// Result of scanning a path for the weak energy condition.
#[derive(Debug, Clone, Copy)]
pub struct WecCheck {
    pub holds: bool,
    pub min_e: f64,
}

/// The weak energy condition propagates along flow lines of compliant sets
/// once it holds initially; this verifies it on a computed path up to `tol`.
pub fn wec_propagation_check(path: &FlowlinePath, tol: f64) -> WecCheck {
    let min_e = path.min_e();
    WecCheck { holds: min_e >= -tol, min_e }
}

/// A-priori bound on the bulk stress along any flow line:
/// |Pi(tau)| <= |Pi(0)| + 3 Abar.
pub fn pi_bound(pi0: f64, abar: f64) -> f64 {
    pi0.abs() + 3.0 * abar
}

/// Boundary profile for the transport solution: F0(rho, Pi) = -eps tanh(Pi).
/// It is bounded by eps, strictly decreasing in Pi and independent of rho.
pub fn transport_seed(eps: f64, pi: f64) -> f64 {
    -eps * pi.tanh()
}

/// Anchor for the characteristic construction.
#[derive(Debug, Clone, Copy)]
pub struct CharAnchor {
    pub rho0: f64,
    pub n0: f64,
    pub pi0: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct CharSample {
    pub n: f64,
    pub rho: f64,
    pub pi: f64,
    /// Transport solution F at this point of the characteristic.
    pub f: f64,
}

/// Characteristic curve through the anchor with F and its Pi-sensitivity.
#[derive(Debug, Clone)]
pub struct CharacteristicSolve {
    /// Samples on a uniform grid in log n, ascending in n.
    pub samples: Vec<CharSample>,
    /// Index of the anchor point inside `samples`.
    pub anchor_index: usize,
    /// Finite-difference estimate of dF/dPi from neighbouring
    /// characteristics seeded at Pi0 +- h.
    pub dpi_f: Vec<f64>,
    /// Set when the integration failed before covering the requested range;
    /// the samples then hold the partial curve.
    pub escaped: Option<CharEscape>,
}

#[derive(Debug, Clone, Copy)]
pub struct CharEscape {
    /// Direction in which the curve was lost (-1: toward small n).
    pub direction: i8,
    pub n_reached: f64,
}

#[derive(Debug, Clone, Copy)]
pub struct CharOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Uniform grid spacing in log n.
    pub log_step: f64,
    /// Step for the neighbouring-characteristic estimate of dF/dPi,
    /// scaled as h = dpi_step_rel * (1 + |Pi0|).
    pub dpi_step_rel: f64,
}

impl Default for CharOptions {
    fn default() -> Self {
        CharOptions { rtol: 1e-9, atol: 1e-12, log_step: 1e-3, dpi_step_rel: 1e-4 }
    }
}

/// Integrates (rho, Pi) along one characteristic over a log-n grid.
/// Returns the grid values; on failure, whatever was reached.
fn trace_characteristic(
    set: &ConstitutiveSet,
    anchor: &CharAnchor,
    s_targets: &[f64],
    opts: &CharOptions,
) -> (Vec<[f64; 2]>, bool) {
    // In s = ln n the characteristic system reads
    //   drho/ds = rho + p(rho, n) + Pi,   dPi/ds = zeta/tau0,
    // with n = exp(s).
    let rhs = |s: f64, y: &[f64], dy: &mut [f64]| {
        let n = s.exp();
        dy[0] = y[0] + set.pressure(y[0], n) + y[1];
        dy[1] = set.zeta_over_tau0(y[0], n);
    };
    let ode_opts = OdeOptions { rtol: opts.rtol, atol: opts.atol, ..Default::default() };
    let mut out = Vec::with_capacity(s_targets.len());
    let s0 = anchor.n0.ln();
    let mut t = 0.0; // integrate in sigma = |s - s0| along the chosen direction
    let mut y = vec![anchor.rho0, anchor.pi0];
    for &s in s_targets {
        let dir = if s >= s0 { 1.0 } else { -1.0 };
        let target = (s - s0).abs();
        if target <= t {
            out.push([y[0], y[1]]);
            continue;
        }
        let path = ode::integrate_adaptive(
            |sig, y, dy| {
                let mut tmp = [0.0; 2];
                rhs(s0 + dir * sig, y, &mut tmp);
                dy[0] = dir * tmp[0];
                dy[1] = dir * tmp[1];
            },
            t,
            target,
            &y,
            &ode_opts,
            |_, _| false,
        );
        match path.outcome {
            OdeOutcome::Completed => {
                t = target;
                y = path.ys.last().unwrap().clone();
                out.push([y[0], y[1]]);
            }
            _ => return (out, false),
        }
    }
    (out, true)
}

/// Solves the transport equation along the characteristic through `anchor`,
/// covering `n_range`, and estimates dF/dPi from neighbouring curves.
///
/// Along a characteristic both Pi and F integrate the same source, so
/// F = F0(rho0, Pi0) + (Pi - Pi0) exactly; the ODE solve provides Pi.
pub fn solve_f_characteristic(
    set: &ConstitutiveSet,
    anchor: &CharAnchor,
    eps: f64,
    n_range: (f64, f64),
    opts: &CharOptions,
) -> CharacteristicSolve {
    assert!(anchor.n0 > 0.0 && n_range.0 > 0.0 && n_range.1 > n_range.0);
    let s0 = anchor.n0.ln();
    let s_lo = n_range.0.ln();
    let s_hi = n_range.1.ln();
    let k_down = if s0 > s_lo { ((s0 - s_lo) / opts.log_step).ceil() as i64 } else { 0 };
    let k_up = if s_hi > s0 { ((s_hi - s0) / opts.log_step).ceil() as i64 } else { 0 };
    let below: Vec<f64> = (1..=k_down).map(|k| s0 - k as f64 * opts.log_step).collect();
    let above: Vec<f64> = (1..=k_up).map(|k| s0 + k as f64 * opts.log_step).collect();

    let h = opts.dpi_step_rel * (1.0 + anchor.pi0.abs());
    let seeds = [anchor.pi0, anchor.pi0 + h, anchor.pi0 - h];
    // curves[i] = (descending branch, ok), (ascending branch, ok)
    let mut branches = Vec::new();
    for pi0 in seeds {
        let a = CharAnchor { pi0, ..*anchor };
        let down = trace_characteristic(set, &a, &below, opts);
        let up = trace_characteristic(set, &a, &above, opts);
        branches.push((down, up));
    }

    let f_of = |pi0: f64, pi: f64| transport_seed(eps, pi0) + (pi - pi0);

    // Assemble ascending-in-n samples for the central curve, truncated to
    // what every seed curve reached (the dF/dPi estimate needs all three).
    let down_len = branches.iter().map(|b| b.0 .0.len()).min().unwrap();
    let up_len = branches.iter().map(|b| b.1 .0.len()).min().unwrap();
    let mut samples = Vec::with_capacity(down_len + up_len + 1);
    let mut dpi_f = Vec::with_capacity(down_len + up_len + 1);
    for i in (0..down_len).rev() {
        let s = below[i];
        let n = s.exp();
        let c = branches[0].0 .0[i];
        samples.push(CharSample { n, rho: c[0], pi: c[1], f: f_of(seeds[0], c[1]) });
        let fp = f_of(seeds[1], branches[1].0 .0[i][1]);
        let fm = f_of(seeds[2], branches[2].0 .0[i][1]);
        dpi_f.push((fp - fm) / (2.0 * h));
    }
    let anchor_index = samples.len();
    samples.push(CharSample {
        n: anchor.n0,
        rho: anchor.rho0,
        pi: anchor.pi0,
        f: f_of(seeds[0], anchor.pi0),
    });
    dpi_f.push((f_of(seeds[1], seeds[1]) - f_of(seeds[2], seeds[2])) / (2.0 * h));
    for i in 0..up_len {
        let s = above[i];
        let n = s.exp();
        let c = branches[0].1 .0[i];
        samples.push(CharSample { n, rho: c[0], pi: c[1], f: f_of(seeds[0], c[1]) });
        let fp = f_of(seeds[1], branches[1].1 .0[i][1]);
        let fm = f_of(seeds[2], branches[2].1 .0[i][1]);
        dpi_f.push((fp - fm) / (2.0 * h));
    }

    let escaped = if down_len < below.len() {
        Some(CharEscape { direction: -1, n_reached: samples.first().unwrap().n })
    } else if up_len < above.len() {
        Some(CharEscape { direction: 1, n_reached: samples.last().unwrap().n })
    } else {
        None
    };
    CharacteristicSolve { samples, anchor_index, dpi_f, escaped }
}

/// Evaluates the transport solution F at an arbitrary point (rho, n, Pi) by
/// tracing its characteristic back to the anchor density `n0`.
pub fn eval_transport_f(
    set: &ConstitutiveSet,
    rho: f64,
    n: f64,
    pi: f64,
    n0: f64,
    eps: f64,
    opts: &CharOptions,
) -> Option<f64> {
    assert!(n > 0.0 && n0 > 0.0);
    if n == n0 {
        return Some(transport_seed(eps, pi));
    }
    let anchor = CharAnchor { rho0: rho, n0: n, pi0: pi };
    let (vals, ok) = trace_characteristic(set, &anchor, &[n0.ln()], opts);
    if !ok || vals.is_empty() {
        return None;
    }
    let pi_at_n0 = vals[0][1];
    Some(transport_seed(eps, pi_at_n0) + (pi - pi_at_n0))
}
