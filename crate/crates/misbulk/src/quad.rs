//! Adaptive Gauss-Kronrod quadrature (7-point Gauss / 15-point Kronrod pair).
//!
//! All integrals in this crate go through [`integrate`] or one of its
//! wrappers, so every result carries an error estimate that callers can
//! record. The semi-infinite helper [`integrate_log_halfline`] substitutes
//! `n = exp(s)` and widens the window until the increments fall below the
//! tolerance, which doubles as a divergence detector.

// The node/weight tables keep their full published precision.
#![allow(clippy::excessive_precision)]

/// Kronrod abscissae for the positive half interval, K15.
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];

/// Kronrod weights matching `XGK`.
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];

/// Gauss weights for the embedded G7 rule (nodes are XGK[1], XGK[3], XGK[5], XGK[7]).
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Outcome of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadResult {
    pub value: f64,
    /// Conservative estimate of the absolute error.
    pub error: f64,
    pub evals: usize,
    /// False when the segment budget ran out before the tolerance was met.
    pub converged: bool,
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

/// One G7K15 application on [a, b]; returns (kronrod, |kronrod - gauss| scaled).
fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kron = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    let mut resabs = kron.abs();
    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        kron += WGK[j] * (f1 + f2);
        resabs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (f1 + f2);
        }
    }
    kron *= half;
    gauss *= half;
    resabs *= half.abs();
    let raw = (kron - gauss).abs();
    // QUADPACK-style rescaling keeps the estimate conservative without
    // collapsing to zero on rough integrands.
    let mut err = raw;
    if resabs != 0.0 && raw != 0.0 {
        let scale = (200.0 * raw / resabs).powf(1.5);
        if scale < 1.0 {
            err = resabs * scale;
        }
    }
    let floor = 50.0 * f64::EPSILON * resabs;
    (kron, err.max(floor))
}

/// Globally adaptive integration of `f` over [a, b].
///
/// Splits the segment with the largest error estimate until the summed
/// estimate drops below `max(tol_abs, tol_rel * |value|)` or the segment
/// budget is exhausted.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol_abs: f64, tol_rel: f64) -> QuadResult {
    integrate_segments(f, &[a, b], tol_abs, tol_rel)
}

/// Adaptive integration over a partition given by `points` (sorted endpoints
/// and interior breakpoints). Breakpoints let callers isolate kinks such as
/// the edges of a mollified shell profile.
pub fn integrate_segments<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    tol_abs: f64,
    tol_rel: f64,
) -> QuadResult {
    assert!(points.len() >= 2, "need at least two endpoints");
    let mut segs: Vec<Segment> = Vec::new();
    let mut evals = 0usize;
    for w in points.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a == b {
            continue;
        }
        let (v, e) = gk15(&f, a, b);
        evals += 15;
        segs.push(Segment { a, b, value: v, error: e });
    }
    const MAX_SEGMENTS: usize = 50_000;
    loop {
        let total: f64 = segs.iter().map(|s| s.value).sum();
        let err: f64 = segs.iter().map(|s| s.error).sum();
        let tol = tol_abs.max(tol_rel * total.abs());
        if err <= tol || segs.len() >= MAX_SEGMENTS {
            return QuadResult { value: total, error: err, evals, converged: err <= tol };
        }
        // Split the worst segment. A linear scan keeps the procedure
        // deterministic across platforms.
        let mut worst = 0;
        for (i, s) in segs.iter().enumerate() {
            if s.error > segs[worst].error {
                worst = i;
            }
        }
        let s = segs[worst];
        let mid = 0.5 * (s.a + s.b);
        if mid <= s.a || mid >= s.b {
            // Interval at floating-point resolution; accept what we have.
            return QuadResult {
                value: segs.iter().map(|s| s.value).sum(),
                error: segs.iter().map(|s| s.error).sum(),
                evals,
                converged: false,
            };
        }
        let (v1, e1) = gk15(&f, s.a, mid);
        let (v2, e2) = gk15(&f, mid, s.b);
        evals += 30;
        segs[worst] = Segment { a: s.a, b: mid, value: v1, error: e1 };
        segs.push(Segment { a: mid, b: s.b, value: v2, error: e2 });
    }
}

/// Failure modes of the half-line integration.
#[derive(Debug, Clone, PartialEq)]
pub enum HalflineError {
    /// Window increments did not decay; the integral looks divergent.
    Divergent { window: f64, last_increment: f64 },
    /// The adaptive rule itself failed to converge inside a window.
    QuadratureFailure { window: f64, error: f64 },
}

impl std::fmt::Display for HalflineError {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            HalflineError::Divergent { window, last_increment } => write!(
                out,
                "half-line integral diverges: window +/-{window} still adds {last_increment:e}"
            ),
            HalflineError::QuadratureFailure { window, error } => write!(
                out,
                "quadrature failed to converge on window +/-{window} (error {error:e})"
            ),
        }
    }
}

impl std::error::Error for HalflineError {}

/// Integrates `g(n)` over n in (0, inf) via the substitution n = exp(s).
///
/// The caller supplies the *log-axis* integrand `h(s) = g(exp(s)) * exp(s)`
/// indirectly: we evaluate `g` and perform the substitution here. Windows
/// [-S, S] are widened geometrically; failure to converge reports
/// [`HalflineError::Divergent`].
pub fn integrate_log_halfline<G: Fn(f64) -> f64>(
    g: G,
    tol_abs: f64,
) -> Result<QuadResult, HalflineError> {
    let h = |s: f64| {
        let n = s.exp();
        if n == 0.0 || !n.is_finite() {
            return 0.0;
        }
        g(n) * n
    };
    let window_tol = 0.25 * tol_abs;
    let mut s_lo = 8.0_f64;
    let core = integrate(h, -s_lo, s_lo, window_tol, 0.0);
    let mut value = core.value;
    let mut error = core.error;
    let mut evals = core.evals;
    if !core.converged {
        return Err(HalflineError::QuadratureFailure { window: s_lo, error: core.error });
    }
    let mut prev_increment = f64::INFINITY;
    loop {
        let s_hi = 2.0 * s_lo;
        let left = integrate(h, -s_hi, -s_lo, window_tol, 0.0);
        let right = integrate(h, s_lo, s_hi, window_tol, 0.0);
        evals += left.evals + right.evals;
        if !left.converged || !right.converged {
            return Err(HalflineError::QuadratureFailure {
                window: s_hi,
                error: left.error.max(right.error),
            });
        }
        let increment = left.value + right.value;
        value += increment;
        error += left.error + right.error;
        if increment.abs() <= 0.5 * tol_abs {
            return Ok(QuadResult {
                value,
                error: error + increment.abs(),
                evals,
                converged: true,
            });
        }
        if s_hi >= 512.0 || increment.abs() >= prev_increment.abs() {
            return Err(HalflineError::Divergent { window: s_hi, last_increment: increment });
        }
        prev_increment = increment;
        s_lo = s_hi;
    }
}
