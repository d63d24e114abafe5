//! Embedded Runge-Kutta integration (Dormand-Prince 5(4)) with adaptive
//! step control, plus a fixed-step RK4 used as an independent reference in
//! the test suites.

/// Controls for the adaptive integrator.
#[derive(Debug, Clone, Copy)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    /// Optional cap on the step size (useful when samples feed finite
    /// differences downstream).
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        OdeOptions { rtol: 1e-9, atol: 1e-12, max_step: f64::INFINITY, max_steps: 1_000_000 }
    }
}

/// Why an integration stopped.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OdeOutcome {
    Completed,
    /// The caller's stop predicate fired at the recorded time.
    StoppedEarly { t: f64 },
    /// Step-size collapse; `t` is the last time with a good state.
    StiffFailure { t: f64 },
}

/// Accepted integration samples.
#[derive(Debug, Clone)]
pub struct OdePath {
    pub ts: Vec<f64>,
    pub ys: Vec<Vec<f64>>,
    pub outcome: OdeOutcome,
}

const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Difference between the 5th and embedded 4th order weights.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

/// Dormand-Prince stepper with reusable stage buffers.
pub struct Dopri5 {
    dim: usize,
    k: [Vec<f64>; 7],
    y_try: Vec<f64>,
    y_new: Vec<f64>,
}

impl Dopri5 {
    pub fn new(dim: usize) -> Self {
        Dopri5 {
            dim,
            k: std::array::from_fn(|_| vec![0.0; dim]),
            y_try: vec![0.0; dim],
            y_new: vec![0.0; dim],
        }
    }

    /// One trial step from (t, y) with size h. Returns the scaled error norm;
    /// the candidate state is left in `self.y_new` (FSAL is not exploited).
    fn try_step<F: FnMut(f64, &[f64], &mut [f64])>(
        &mut self,
        f: &mut F,
        t: f64,
        y: &[f64],
        h: f64,
        rtol: f64,
        atol: f64,
    ) -> f64 {
        let Dopri5 { dim, k, y_try, y_new } = self;
        let d = *dim;
        f(t, y, &mut k[0]);
        for i in 0..d {
            y_try[i] = y[i] + h * A21 * k[0][i];
        }
        f(t + h / 5.0, y_try, &mut k[1]);
        for i in 0..d {
            y_try[i] = y[i] + h * (A31 * k[0][i] + A32 * k[1][i]);
        }
        f(t + 3.0 * h / 10.0, y_try, &mut k[2]);
        for i in 0..d {
            y_try[i] = y[i] + h * (A41 * k[0][i] + A42 * k[1][i] + A43 * k[2][i]);
        }
        f(t + 4.0 * h / 5.0, y_try, &mut k[3]);
        for i in 0..d {
            y_try[i] = y[i] + h * (A51 * k[0][i] + A52 * k[1][i] + A53 * k[2][i] + A54 * k[3][i]);
        }
        f(t + 8.0 * h / 9.0, y_try, &mut k[4]);
        for i in 0..d {
            y_try[i] = y[i]
                + h * (A61 * k[0][i] + A62 * k[1][i] + A63 * k[2][i] + A64 * k[3][i] + A65 * k[4][i]);
        }
        f(t + h, y_try, &mut k[5]);
        for i in 0..d {
            y_new[i] =
                y[i] + h * (B1 * k[0][i] + B3 * k[2][i] + B4 * k[3][i] + B5 * k[4][i] + B6 * k[5][i]);
        }
        f(t + h, y_new, &mut k[6]);
        let mut err = 0.0;
        for i in 0..d {
            let e = h
                * (E1 * k[0][i]
                    + E3 * k[2][i]
                    + E4 * k[3][i]
                    + E5 * k[4][i]
                    + E6 * k[5][i]
                    + E7 * k[6][i]);
            let sc = atol + rtol * y[i].abs().max(y_new[i].abs());
            err += (e / sc) * (e / sc);
        }
        (err / d as f64).sqrt()
    }
}

/// Adaptive integration of dy/dt = f(t, y) from `t0` to `t1` (t1 > t0).
///
/// Every accepted step is recorded. `stop` is checked on accepted states and
/// halts the integration early when it returns true.
pub fn integrate_adaptive<F, S>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: &[f64],
    opts: &OdeOptions,
    mut stop: S,
) -> OdePath
where
    F: FnMut(f64, &[f64], &mut [f64]),
    S: FnMut(f64, &[f64]) -> bool,
{
    let dim = y0.len();
    let mut stepper = Dopri5::new(dim);
    let mut t = t0;
    let mut y = y0.to_vec();
    let mut ts = vec![t0];
    let mut ys = vec![y.clone()];
    let span = t1 - t0;
    assert!(span > 0.0, "integration span must be positive");
    let mut h = (span / 100.0).min(opts.max_step);
    let h_min = span * 1e-14;
    let mut steps = 0usize;
    while t < t1 {
        if steps >= opts.max_steps {
            return OdePath { ts, ys, outcome: OdeOutcome::StiffFailure { t } };
        }
        steps += 1;
        h = h.min(t1 - t).min(opts.max_step);
        let err = stepper.try_step(&mut f, t, &y, h, opts.rtol, opts.atol);
        if !err.is_finite() {
            h *= 0.25;
            if h < h_min {
                return OdePath { ts, ys, outcome: OdeOutcome::StiffFailure { t } };
            }
            continue;
        }
        if err <= 1.0 {
            t += h;
            y.copy_from_slice(&stepper.y_new);
            ts.push(t);
            ys.push(y.clone());
            if stop(t, &y) {
                return OdePath { ts, ys, outcome: OdeOutcome::StoppedEarly { t } };
            }
            let grow = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(1.0, 5.0) };
            h *= grow;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if h < h_min {
                return OdePath { ts, ys, outcome: OdeOutcome::StiffFailure { t } };
            }
        }
    }
    OdePath { ts, ys, outcome: OdeOutcome::Completed }
}

/// Adaptive integration that lands exactly on each requested output point.
/// Returns the states at `t_out` (which must be strictly increasing and
/// start after `t0`).
pub fn integrate_to_points<F>(
    mut f: F,
    t0: f64,
    y0: &[f64],
    t_out: &[f64],
    opts: &OdeOptions,
) -> Result<Vec<Vec<f64>>, OdeOutcome>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let mut states = Vec::with_capacity(t_out.len());
    let mut t = t0;
    let mut y = y0.to_vec();
    for &target in t_out {
        assert!(target > t, "output points must increase");
        let path = integrate_adaptive(&mut f, t, target, &y, opts, |_, _| false);
        match path.outcome {
            OdeOutcome::Completed => {
                t = target;
                y = path.ys.last().unwrap().clone();
                states.push(y.clone());
            }
            other => return Err(other),
        }
    }
    Ok(states)
}

/// Classic fixed-step RK4. Kept deliberately separate from the adaptive
/// path so the two can cross-check each other.
pub fn rk4_fixed<F>(mut f: F, t0: f64, t1: f64, y0: &[f64], n_steps: usize) -> Vec<f64>
where
    F: FnMut(f64, &[f64], &mut [f64]),
{
    let dim = y0.len();
    let h = (t1 - t0) / n_steps as f64;
    let mut y = y0.to_vec();
    let mut k1 = vec![0.0; dim];
    let mut k2 = vec![0.0; dim];
    let mut k3 = vec![0.0; dim];
    let mut k4 = vec![0.0; dim];
    let mut tmp = vec![0.0; dim];
    let mut t = t0;
    for _ in 0..n_steps {
        f(t, &y, &mut k1);
        for i in 0..dim {
            tmp[i] = y[i] + 0.5 * h * k1[i];
        }
        f(t + 0.5 * h, &tmp, &mut k2);
        for i in 0..dim {
            tmp[i] = y[i] + 0.5 * h * k2[i];
        }
        f(t + 0.5 * h, &tmp, &mut k3);
        for i in 0..dim {
            tmp[i] = y[i] + h * k3[i];
        }
        f(t + h, &tmp, &mut k4);
        for i in 0..dim {
            y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        t += h;
    }
    y
}
