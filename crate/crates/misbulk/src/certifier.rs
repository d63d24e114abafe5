//! Numerical certification of finite-time breakdown for shell data.
//!
//! The certifier assembles the constants that enter the virial-based
//! breakdown argument (conserved energy E, initial moment flux Q0, the
//! envelope constants b and k built from the a-priori bulk-stress bound,
//! the comparison radius Rbar = mu R0) and checks the sufficient
//! inequalities. A valid certificate implies the admissible evolution of
//! that data cannot extend smoothly past (Rbar - R0)/c.

use crate::constitutive::{abar_bound, AbarSpec, ConstitutiveSet};
use crate::quad;
use crate::shell::ShellData;
use crate::state::is_physical;

const FOUR_PI_OVER_3: f64 = 4.0 * std::f64::consts::PI / 3.0;
const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Knobs for certificate assembly. The radial quadratures themselves run
/// at a fixed absolute tolerance of 1e-10 with their error estimates
/// recorded in the certificate.
#[derive(Debug, Clone, Copy)]
pub struct CertifySpec {
    pub abar: AbarSpec,
    /// Multiplicative slack on exp(mu integral); any positive value keeps
    /// the strict inequality the argument needs.
    pub mu_margin: f64,
    /// Margin for the pointwise admissibility checks of the data.
    pub admissibility_margin: f64,
    /// Radial sample count for sup-norms and admissibility scans.
    pub profile_samples: usize,
}

impl Default for CertifySpec {
    fn default() -> Self {
        CertifySpec {
            abar: AbarSpec::default(),
            mu_margin: 0.05,
            admissibility_margin: 1e-10,
            profile_samples: 1024,
        }
    }
}

/// (c+1)^2 / (2(c^2+1)); the shell-ratio threshold for background sound
/// speed c. Strictly between 1/2 and 1 for c in (0, 1).
pub fn threshold(c: f64) -> f64 {
    (c + 1.0) * (c + 1.0) / (2.0 * (c * c + 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ZeroVelocityProfile;

impl std::fmt::Display for ZeroVelocityProfile {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(out, "shell ratio undefined: velocity profile vanishes identically")
    }
}

impl std::error::Error for ZeroVelocityProfile {}

#[derive(Debug, Clone, Copy)]
pub struct ShellRatio {
    pub ratio: f64,
    pub quad_error: f64,
}

/// The geometric shell ratio
/// `int x . u1 |u1| e dx / (R0 int |u1|^2 e dx)`.
/// The breakdown argument needs it to exceed [`threshold`].
pub fn shell_ratio(data: &ShellData, set: &ConstitutiveSet) -> Result<ShellRatio, ZeroVelocityProfile> {
    let e = |r: f64| {
        let rho = data.rho_ring(r);
        let n = data.n_ring(r);
        rho + set.pressure(rho, n) + data.pi_ring(r)
    };
    let pts = data.breakpoints();
    let tol = 1e-12;
    let num = quad::integrate_segments(
        |r| {
            let s = data.unit_velocity(r);
            r * r * r * s * s.abs() * e(r)
        },
        &pts,
        tol,
        1e-12,
    );
    let den = quad::integrate_segments(
        |r| {
            let s = data.unit_velocity(r);
            r * r * s * s * e(r)
        },
        &pts,
        tol,
        1e-12,
    );
    if den.value == 0.0 {
        return Err(ZeroVelocityProfile);
    }
    let ratio = num.value / (data.r0 * den.value);
    let quad_error = (num.error + ratio.abs() * data.r0 * den.error) / (data.r0 * den.value.abs());
    Ok(ShellRatio { ratio, quad_error })
}

#[derive(Debug, Clone, Copy)]
pub struct Integral {
    pub value: f64,
    pub quad_error: f64,
}

/// Conserved energy of the data relative to the background:
/// `E = int_{B_R0} e |u|^2 + (rho - rho_bar) dx`.
pub fn energy_e0(data: &ShellData, set: &ConstitutiveSet) -> Integral {
    let rho_bar = data.background.rho_bar;
    let r = quad::integrate_segments(
        |r| {
            let rho = data.rho_ring(r);
            let n = data.n_ring(r);
            let e = rho + set.pressure(rho, n) + data.pi_ring(r);
            let u = data.velocity(r);
            FOUR_PI * r * r * (e * u * u + (rho - rho_bar))
        },
        &data.breakpoints(),
        1e-10,
        1e-12,
    );
    Integral { value: r.value, quad_error: r.error }
}

/// Same energy through the T^00 route; used as a cross-check of the
/// reduced formula.
pub fn energy_e0_t00(data: &ShellData, set: &ConstitutiveSet) -> Integral {
    let rho_bar = data.background.rho_bar;
    let r = quad::integrate_segments(
        |r| {
            let s = data.state_at(r, set);
            let t = crate::state::stress_energy(&s, set);
            FOUR_PI * r * r * (t.t00 - rho_bar)
        },
        &data.breakpoints(),
        1e-10,
        1e-12,
    );
    Integral { value: r.value, quad_error: r.error }
}

/// Initial radial moment flux `Q(0) = int x . u sqrt(1+|u|^2) e dx`.
pub fn q_initial(data: &ShellData, set: &ConstitutiveSet) -> Integral {
    let r = quad::integrate_segments(
        |r| {
            let rho = data.rho_ring(r);
            let n = data.n_ring(r);
            let e = rho + set.pressure(rho, n) + data.pi_ring(r);
            let u = data.velocity(r);
            FOUR_PI * r * r * r * u * (1.0 + u * u).sqrt() * e
        },
        &data.breakpoints(),
        1e-10,
        1e-12,
    );
    Integral { value: r.value, quad_error: r.error }
}

/// Initial kinetic energy `int e |u|^2 dx`.
pub fn kinetic_energy0(data: &ShellData, set: &ConstitutiveSet) -> Integral {
    let r = quad::integrate_segments(
        |r| {
            let rho = data.rho_ring(r);
            let n = data.n_ring(r);
            let e = rho + set.pressure(rho, n) + data.pi_ring(r);
            let u = data.velocity(r);
            FOUR_PI * r * r * e * u * u
        },
        &data.breakpoints(),
        1e-10,
        1e-12,
    );
    Integral { value: r.value, quad_error: r.error }
}

/// Sup norm of the initial bulk stress profile over the ball.
pub fn pi_sup(data: &ShellData, samples: usize) -> f64 {
    let m = samples.max(2);
    let mut best = 0.0f64;
    for i in 0..=m {
        let r = data.r0 * i as f64 / m as f64;
        best = best.max(data.pi_ring(r).abs());
    }
    best
}

/// Envelope constants of the virial argument:
/// b = 4pi/3 (rho_bar + p1 + |Pi0|_inf + 3 Abar),
/// k = 4pi/3 (|Pi0|_inf + 3 Abar + p0 + p_bar).
pub fn constants_bk(set: &ConstitutiveSet, data: &ShellData, abar: f64) -> (f64, f64) {
    let sup = pi_sup(data, 1024);
    let p_bar = data.background.pressure(set);
    let b = FOUR_PI_OVER_3 * (data.background.rho_bar + set.p1 + sup + 3.0 * abar);
    let k = FOUR_PI_OVER_3 * (sup + 3.0 * abar + set.p0 + p_bar);
    (b, k)
}

#[derive(Debug, Clone, PartialEq)]
pub enum MuError {
    SoundSpeedOutOfRange { c: f64 },
    QuadratureFailure { error: f64 },
}

impl std::fmt::Display for MuError {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MuError::SoundSpeedOutOfRange { c } => {
                write!(out, "mu integral needs 0 <= c < 1, got c = {c}")
            }
            MuError::QuadratureFailure { error } => {
                write!(out, "mu integral did not converge (error {error:e})")
            }
        }
    }
}

impl std::error::Error for MuError {}

#[derive(Debug, Clone, Copy)]
pub struct MuResult {
    pub mu: f64,
    pub integral: f64,
    pub quad_error: f64,
}

/// Picks the comparison-radius factor mu > 1 with
/// `int_threshold(c)^1 dz / (1 - sqrt(1-z^2) - c z) < log mu`,
/// realized as exp(integral) * (1 + margin).
pub fn mu_for_c(c: f64, margin: f64) -> Result<MuResult, MuError> {
    if !(0.0..1.0).contains(&c) {
        return Err(MuError::SoundSpeedOutOfRange { c });
    }
    let lo = threshold(c);
    let h = |z: f64| 1.0 - (1.0 - z * z).sqrt() - c * z;
    let r = quad::integrate(|z| 1.0 / h(z), lo, 1.0, 1e-10, 1e-12);
    if !r.converged {
        return Err(MuError::QuadratureFailure { error: r.error });
    }
    Ok(MuResult { mu: r.value.exp() * (1.0 + margin), integral: r.value, quad_error: r.error })
}

/// z0(A, B) = (A(1-B) + sqrt(A^2 + 2B - B^2)) / (A^2 + 1), when the
/// discriminant is nonnegative.
pub fn z0_value(a: f64, b: f64) -> Option<f64> {
    let disc = a * a + 2.0 * b - b * b;
    if disc < 0.0 {
        return None;
    }
    Some((a * (1.0 - b) + disc.sqrt()) / (a * a + 1.0))
}

/// The two structural blowup conditions built from (E, b, k, c, R0, Rbar).
#[derive(Debug, Clone, Copy)]
pub struct BlowupConditions {
    pub a_coef: f64,
    pub b_coef: f64,
    pub z0: Option<f64>,
    pub cond1: bool,
    pub cond2: bool,
    pub cond2_integral: Option<f64>,
    /// log(Rbar / R0), the bound the integral must stay under.
    pub cond2_bound: f64,
    pub cond2_quad_error: f64,
    /// Minimum of the integrand denominator h on the integration interval.
    pub h_min: f64,
}

pub fn blowup_conditions(e0: f64, b: f64, k: f64, c: f64, r0: f64, rbar: f64) -> BlowupConditions {
    assert!(e0 > 0.0, "blowup conditions need E > 0");
    let rbar3 = rbar * rbar * rbar;
    let denom = e0 + b * rbar3;
    let a_coef = c * (1.0 + 3.0 * b * rbar3 / denom);
    let b_coef = k * rbar3 / denom;
    let z0 = z0_value(a_coef, b_coef);
    let disc = a_coef * a_coef + 2.0 * b_coef - b_coef * b_coef;
    let cond1 = disc > 0.0 && a_coef + b_coef < 1.0 && z0.map(|z| z < 1.0).unwrap_or(false);
    let cond2_bound = (rbar / r0).ln();
    let mut cond2 = false;
    let mut cond2_integral = None;
    let mut cond2_quad_error = 0.0;
    let mut h_min = f64::INFINITY;
    if cond1 {
        let z0v = z0.unwrap();
        let lo = 0.5 * (1.0 + z0v);
        let h = |z: f64| 1.0 - (1.0 - z * z).sqrt() - a_coef * z - b_coef;
        // The argument needs h > 0 strictly above z0; scan before inverting.
        let m = 2048;
        for i in 0..=m {
            let z = lo + (1.0 - lo) * i as f64 / m as f64;
            h_min = h_min.min(h(z));
        }
        if h_min > 0.0 {
            let r = quad::integrate(|z| 1.0 / h(z), lo, 1.0, 1e-10, 1e-12);
            cond2_integral = Some(r.value);
            cond2_quad_error = r.error;
            cond2 = r.converged && r.value < cond2_bound;
        }
    }
    BlowupConditions {
        a_coef,
        b_coef,
        z0,
        cond1,
        cond2,
        cond2_integral,
        cond2_bound,
        cond2_quad_error,
        h_min,
    }
}

/// Everything the breakdown argument needs, with pass/fail flags.
#[derive(Debug, Clone)]
pub struct Certificate {
    pub sigma: f64,
    pub r0: f64,
    pub ell: f64,
    pub smooth_w: f64,
    pub rho_bar: f64,
    pub n_bar: f64,
    pub p_bar: f64,
    pub c: f64,
    pub threshold: f64,
    pub ratio: f64,
    pub ratio_cond: bool,
    pub abar: f64,
    pub pi_sup: f64,
    pub b: f64,
    pub k: f64,
    pub mu: f64,
    pub rbar: f64,
    pub e0: f64,
    pub q0: f64,
    pub t_kin0: f64,
    pub a_coef: f64,
    pub b_coef: f64,
    pub z0: Option<f64>,
    pub cond1: bool,
    pub cond2: bool,
    pub cond2_integral: Option<f64>,
    pub cond2_bound: f64,
    pub cond3: bool,
    pub cond3_lhs: f64,
    pub valid: bool,
    /// Upper bound (Rbar - R0)/c on the breakdown time of certified data.
    pub t_upper: f64,
    pub sigma0: Option<f64>,
    /// Quadrature error estimates keyed by quantity name.
    pub quad_errors: Vec<(String, f64)>,
    /// Human-readable reasons when invalid; not serialized.
    pub reasons: Vec<String>,
}

/// Assembles a certificate for the given shell data. Failed preconditions
/// yield an invalid certificate with reasons, never a panic.
pub fn certify(data: &ShellData, set: &ConstitutiveSet, spec: &CertifySpec) -> Certificate {
    let mut reasons = Vec::new();
    let mut quad_errors = Vec::new();
    let bg = data.background;
    let p_bar = bg.pressure(set);
    let cs2 = set.sound_speed_sq_raw(bg.rho_bar, bg.n_bar, 0.0);
    let c = if cs2 > 0.0 { cs2.sqrt() } else { f64::NAN };
    if !(cs2 > 0.0 && cs2 < 1.0) {
        reasons.push(format!("background sound speed squared {cs2} not in (0, 1)"));
    }

    // Pointwise admissibility of the data on a radial scan.
    let m = spec.profile_samples.max(16);
    let mut min_slack = f64::INFINITY;
    let mut min_e = f64::INFINITY;
    for i in 0..=m {
        let r = data.r0 * i as f64 / m as f64;
        let s = data.state_at(r, set);
        let ph = is_physical(&s, set);
        min_slack = min_slack.min(ph.min_slack);
        min_e = min_e.min(s.wec_value(set));
    }
    if min_slack <= spec.admissibility_margin {
        reasons.push(format!("data leave the physical set (min slack {min_slack:e})"));
    }
    if min_e <= 0.0 {
        reasons.push(format!("data violate rho + p + Pi > 0 (min {min_e:e})"));
    }

    let abar = match abar_bound(set, &spec.abar) {
        Ok(est) => {
            quad_errors.push(("abar".to_string(), est.quad_error));
            est.value
        }
        Err(e) => {
            reasons.push(format!("transport bound integral unavailable: {e}"));
            f64::NAN
        }
    };

    let (ratio, ratio_cond) = match shell_ratio(data, set) {
        Ok(r) => {
            quad_errors.push(("ratio".to_string(), r.quad_error));
            let thr = threshold(c);
            (r.ratio, r.ratio > thr)
        }
        Err(e) => {
            reasons.push(e.to_string());
            (f64::NAN, false)
        }
    };
    if !ratio_cond {
        reasons.push(format!("shell ratio {ratio} does not exceed threshold {}", threshold(c)));
    }

    let e0 = energy_e0(data, set);
    quad_errors.push(("e0".to_string(), e0.quad_error));
    let q0 = q_initial(data, set);
    quad_errors.push(("q0".to_string(), q0.quad_error));
    let tk0 = kinetic_energy0(data, set);
    quad_errors.push(("t_kin0".to_string(), tk0.quad_error));
    let sup = pi_sup(data, spec.profile_samples);
    let (b, k) = if abar.is_finite() {
        constants_bk(set, data, abar)
    } else {
        (f64::NAN, f64::NAN)
    };

    let mu = if (0.0..1.0).contains(&c) {
        match mu_for_c(c, spec.mu_margin) {
            Ok(r) => {
                quad_errors.push(("mu".to_string(), r.quad_error));
                r.mu
            }
            Err(e) => {
                reasons.push(e.to_string());
                f64::NAN
            }
        }
    } else {
        f64::NAN
    };
    let rbar = mu * data.r0;

    let (conds, cond3, cond3_lhs) = if e0.value > 0.0 && b.is_finite() && mu.is_finite() {
        let conds = blowup_conditions(e0.value, b, k, c, data.r0, rbar);
        quad_errors.push(("cond2".to_string(), conds.cond2_quad_error));
        let r03 = data.r0 * data.r0 * data.r0;
        let lhs = q0.value / (data.r0 * (e0.value + b * r03));
        let cond3 = match conds.z0 {
            Some(z0) => lhs > 0.5 * (1.0 + z0),
            None => false,
        };
        (Some(conds), cond3, lhs)
    } else {
        if e0.value <= 0.0 {
            reasons.push(format!("energy E = {} not positive", e0.value));
        }
        (None, false, f64::NAN)
    };
    if !cond3 {
        reasons.push(format!("moment-flux condition fails (lhs {cond3_lhs})"));
    }

    let (a_coef, b_coef, z0, cond1, cond2, cond2_integral, cond2_bound) = match &conds {
        Some(cd) => {
            if !cd.cond1 {
                reasons.push("envelope condition (A, B, z0) fails".to_string());
            }
            if !cd.cond2 {
                reasons.push("comparison integral does not fit under log(Rbar/R0)".to_string());
            }
            (cd.a_coef, cd.b_coef, cd.z0, cd.cond1, cd.cond2, cd.cond2_integral, cd.cond2_bound)
        }
        None => (f64::NAN, f64::NAN, None, false, false, None, f64::NAN),
    };

    let valid = ratio_cond
        && cond1
        && cond2
        && cond3
        && reasons.is_empty();
    let t_upper = (rbar - data.r0) / c;

    Certificate {
        sigma: data.sigma,
        r0: data.r0,
        ell: data.ell,
        smooth_w: data.smooth_w,
        rho_bar: bg.rho_bar,
        n_bar: bg.n_bar,
        p_bar,
        c,
        threshold: threshold(c),
        ratio,
        ratio_cond,
        abar,
        pi_sup: sup,
        b,
        k,
        mu,
        rbar,
        e0: e0.value,
        q0: q0.value,
        t_kin0: tk0.value,
        a_coef,
        b_coef,
        z0,
        cond1,
        cond2,
        cond2_integral,
        cond2_bound,
        cond3,
        cond3_lhs,
        valid,
        t_upper,
        sigma0: None,
        quad_errors,
        reasons,
    }
}

/// Result of the smallest-certified-amplitude search.
#[derive(Debug, Clone)]
pub struct SigmaSearch {
    pub sigma0: f64,
    pub certificate: Certificate,
    /// Every (sigma, certified) pair probed, in probe order.
    pub sweep: Vec<(f64, bool)>,
}

#[derive(Debug, Clone)]
pub struct SigmaNotFound {
    pub sweep: Vec<(f64, bool)>,
    /// Reasons reported at the largest probed amplitude.
    pub last_reasons: Vec<String>,
}

impl std::fmt::Display for SigmaNotFound {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(out, "no certified amplitude in range ({} probes)", self.sweep.len())
    }
}

impl std::error::Error for SigmaNotFound {}

/// Doubling sweep followed by geometric bisection down to 1% relative
/// accuracy. Certifiability is not assumed monotone in sigma; the result is
/// the smallest certified amplitude actually found, with the probe grid
/// recorded.
pub fn find_sigma0(
    data: &ShellData,
    set: &ConstitutiveSet,
    sigma_range: (f64, f64),
    spec: &CertifySpec,
) -> Result<SigmaSearch, SigmaNotFound> {
    let (lo, hi) = sigma_range;
    assert!(lo > 0.0 && hi > lo, "need 0 < lo < hi");
    let mut sweep = Vec::new();
    let probe = |sigma: f64, sweep: &mut Vec<(f64, bool)>| {
        let cert = certify(&data.with_sigma(sigma), set, spec);
        sweep.push((sigma, cert.valid));
        cert
    };
    let mut sigma = lo;
    let mut bracket: Option<(f64, f64)> = None; // (uncertified, certified)
    let mut last_uncertified = None;
    let mut last_cert = None;
    loop {
        let cert = probe(sigma, &mut sweep);
        if cert.valid {
            bracket = Some((last_uncertified.unwrap_or(sigma), sigma));
            break;
        }
        last_cert = Some(cert);
        last_uncertified = Some(sigma);
        if sigma >= hi {
            break;
        }
        sigma = (sigma * 2.0).min(hi);
    }
    let Some((mut bad, mut good)) = bracket else {
        return Err(SigmaNotFound {
            sweep,
            last_reasons: last_cert.map(|c| c.reasons).unwrap_or_default(),
        });
    };
    if bad < good {
        while good / bad > 1.01 {
            let mid = (bad * good).sqrt();
            let cert = probe(mid, &mut sweep);
            if cert.valid {
                good = mid;
            } else {
                bad = mid;
            }
        }
    }
    let mut certificate = certify(&data.with_sigma(good), set, spec);
    certificate.sigma0 = Some(good);
    Ok(SigmaSearch { sigma0: good, certificate, sweep })
}

// ---------------------------------------------------------------------------
// Serialization: key = value lines, shortest round-trip decimals.

impl Certificate {
    pub fn to_key_values(&self) -> String {
        let mut out = String::new();
        let mut push = |k: &str, v: String| {
            out.push_str(k);
            out.push_str(" = ");
            out.push_str(&v);
            out.push('\n');
        };
        push("format", "misbulk-certificate-v1".to_string());
        push("sigma", format!("{:?}", self.sigma));
        push("r0", format!("{:?}", self.r0));
        push("ell", format!("{:?}", self.ell));
        push("smooth_w", format!("{:?}", self.smooth_w));
        push("rho_bar", format!("{:?}", self.rho_bar));
        push("n_bar", format!("{:?}", self.n_bar));
        push("p_bar", format!("{:?}", self.p_bar));
        push("c", format!("{:?}", self.c));
        push("threshold", format!("{:?}", self.threshold));
        push("ratio", format!("{:?}", self.ratio));
        push("ratio_cond", self.ratio_cond.to_string());
        push("abar", format!("{:?}", self.abar));
        push("pi_sup", format!("{:?}", self.pi_sup));
        push("b", format!("{:?}", self.b));
        push("k", format!("{:?}", self.k));
        push("mu", format!("{:?}", self.mu));
        push("rbar", format!("{:?}", self.rbar));
        push("e0", format!("{:?}", self.e0));
        push("q0", format!("{:?}", self.q0));
        push("t_kin0", format!("{:?}", self.t_kin0));
        push("a_coef", format!("{:?}", self.a_coef));
        push("b_coef", format!("{:?}", self.b_coef));
        if let Some(z0) = self.z0 {
            push("z0", format!("{z0:?}"));
        }
        push("cond1", self.cond1.to_string());
        push("cond2", self.cond2.to_string());
        if let Some(v) = self.cond2_integral {
            push("cond2_integral", format!("{v:?}"));
        }
        push("cond2_bound", format!("{:?}", self.cond2_bound));
        push("cond3", self.cond3.to_string());
        push("cond3_lhs", format!("{:?}", self.cond3_lhs));
        push("valid", self.valid.to_string());
        push("t_upper", format!("{:?}", self.t_upper));
        if let Some(v) = self.sigma0 {
            push("sigma0", format!("{v:?}"));
        }
        for (name, err) in &self.quad_errors {
            push(&format!("quad_error_{name}"), format!("{err:?}"));
        }
        out
    }

    pub fn from_key_values(text: &str) -> Result<Certificate, String> {
        let mut map = std::collections::BTreeMap::new();
        let mut quad_errors = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| format!("line {}: expected 'key = value'", i + 1))?;
            let key = key.trim().to_string();
            let value = value.trim().to_string();
            if let Some(name) = key.strip_prefix("quad_error_") {
                let v: f64 =
                    value.parse().map_err(|_| format!("line {}: bad float '{value}'", i + 1))?;
                quad_errors.push((name.to_string(), v));
            } else {
                map.insert(key, value);
            }
        }
        if map.get("format").map(String::as_str) != Some("misbulk-certificate-v1") {
            return Err("missing or unknown certificate format line".to_string());
        }
        let f = |key: &str| -> Result<f64, String> {
            map.get(key)
                .ok_or_else(|| format!("missing key '{key}'"))?
                .parse()
                .map_err(|_| format!("bad float for '{key}'"))
        };
        let fo = |key: &str| -> Result<Option<f64>, String> {
            match map.get(key) {
                None => Ok(None),
                Some(v) => v.parse().map(Some).map_err(|_| format!("bad float for '{key}'")),
            }
        };
        let bo = |key: &str| -> Result<bool, String> {
            map.get(key)
                .ok_or_else(|| format!("missing key '{key}'"))?
                .parse()
                .map_err(|_| format!("bad bool for '{key}'"))
        };
        Ok(Certificate {
            sigma: f("sigma")?,
            r0: f("r0")?,
            ell: f("ell")?,
            smooth_w: f("smooth_w")?,
            rho_bar: f("rho_bar")?,
            n_bar: f("n_bar")?,
            p_bar: f("p_bar")?,
            c: f("c")?,
            threshold: f("threshold")?,
            ratio: f("ratio")?,
            ratio_cond: bo("ratio_cond")?,
            abar: f("abar")?,
            pi_sup: f("pi_sup")?,
            b: f("b")?,
            k: f("k")?,
            mu: f("mu")?,
            rbar: f("rbar")?,
            e0: f("e0")?,
            q0: f("q0")?,
            t_kin0: f("t_kin0")?,
            a_coef: f("a_coef")?,
            b_coef: f("b_coef")?,
            z0: fo("z0")?,
            cond1: bo("cond1")?,
            cond2: bo("cond2")?,
            cond2_integral: fo("cond2_integral")?,
            cond2_bound: f("cond2_bound")?,
            cond3: bo("cond3")?,
            cond3_lhs: f("cond3_lhs")?,
            valid: bo("valid")?,
            t_upper: f("t_upper")?,
            sigma0: fo("sigma0")?,
            quad_errors,
            reasons: Vec::new(),
        })
    }

    /// Recomputes every derived flag and constant from the stored inputs and
    /// reports mismatches. An empty result means the certificate is
    /// internally consistent.
    pub fn recheck(&self) -> Vec<String> {
        let mut bad = Vec::new();
        let close = |a: f64, b: f64| {
            (a.is_nan() && b.is_nan()) || (a - b).abs() <= 1e-12 * b.abs().max(1.0)
        };
        if !close(threshold(self.c), self.threshold) {
            bad.push("threshold does not match c".to_string());
        }
        if self.ratio_cond != (self.ratio > self.threshold) {
            bad.push("ratio flag inconsistent".to_string());
        }
        if self.e0 > 0.0 && self.b.is_finite() {
            let conds = blowup_conditions(self.e0, self.b, self.k, self.c, self.r0, self.rbar);
            if !close(conds.a_coef, self.a_coef) || !close(conds.b_coef, self.b_coef) {
                bad.push("envelope coefficients inconsistent".to_string());
            }
            match (conds.z0, self.z0) {
                (Some(a), Some(b)) if close(a, b) => {}
                (None, None) => {}
                _ => bad.push("z0 inconsistent".to_string()),
            }
            if conds.cond1 != self.cond1 {
                bad.push("cond1 flag inconsistent".to_string());
            }
            if conds.cond2 != self.cond2 {
                bad.push("cond2 flag inconsistent".to_string());
            }
            let r03 = self.r0 * self.r0 * self.r0;
            let lhs = self.q0 / (self.r0 * (self.e0 + self.b * r03));
            if !close(lhs, self.cond3_lhs) {
                bad.push("cond3 lhs inconsistent".to_string());
            }
            let cond3 = match self.z0 {
                Some(z0) => lhs > 0.5 * (1.0 + z0),
                None => false,
            };
            if cond3 != self.cond3 {
                bad.push("cond3 flag inconsistent".to_string());
            }
        }
        if self.valid && !(self.ratio_cond && self.cond1 && self.cond2 && self.cond3) {
            bad.push("valid flag inconsistent with conditions".to_string());
        }
        if !close((self.rbar - self.r0) / self.c, self.t_upper) {
            bad.push("t_upper inconsistent".to_string());
        }
        bad
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    
    use crate::shell::VelocityBump;
    use crate::state::ConstantState;

    fn euler_set() -> ConstitutiveSet {
        ConstitutiveSet::ideal_gas(4.0 / 3.0, 0.0)
    }

    fn shell(sigma: f64, ell: f64, w: f64) -> (ShellData, ConstitutiveSet) {
        let set = euler_set();
        let bg = ConstantState::new(1.0, 0.5, &set).unwrap();
        (ShellData::new(1.0, ell, sigma, w, bg).unwrap(), set)
    }

    #[test]
    fn threshold_endpoints() {
        assert!((threshold(0.0) - 0.5).abs() < 1e-15);
        assert!((threshold(1.0) - 1.0).abs() < 1e-15);
        for i in 1..10 {
            let c = i as f64 / 10.0;
            let t = threshold(c);
            assert!(t > 0.5 && t < 1.0);
            // Denominator positivity of the mu integrand at its lower end:
            // threshold(c) > 2c/(c^2+1), equivalent to (c-1)^2 > 0.
            assert!(t > 2.0 * c / (c * c + 1.0));
        }
    }

    #[test]
    fn sharp_shell_ratio_closed_form() {
        // R0 = 1, ell = 1/2, uniform e, no mollification:
        // ratio = 3 (1 - (1/2)^4) / (4 (1 - (1/2)^3)) = 45/56.
        let (data, set) = shell(1.0, 0.5, 0.0);
        let r = shell_ratio(&data, &set).unwrap();
        assert!((r.ratio - 45.0 / 56.0).abs() < 1e-8, "got {}", r.ratio);
    }

    #[test]
    fn ratio_tends_to_one_for_thin_shells() {
        let mut prev = 0.0;
        for ell in [0.4, 0.2, 0.1, 0.05, 0.01, 0.001] {
            let (data, set) = shell(1.0, ell, 0.0);
            let r = shell_ratio(&data, &set).unwrap().ratio;
            assert!(r > prev, "ratio not increasing: {r} after {prev}");
            prev = r;
        }
        assert!(prev > 0.999, "thin-shell ratio {prev}");
    }

    #[test]
    fn ratio_crosses_threshold_for_every_subluminal_speed() {
        for i in 1..10 {
            let c = i as f64 / 10.0;
            let thr = threshold(c);
            let mut crossed = false;
            for k in 1..200 {
                let ell = k as f64 * 0.005;
                if ell >= 1.0 {
                    break;
                }
                let (data, set) = shell(1.0, ell, 0.0);
                if shell_ratio(&data, &set).unwrap().ratio > thr {
                    crossed = true;
                    break;
                }
            }
            assert!(crossed, "no shell crosses threshold for c = {c}");
        }
    }

    #[test]
    fn ratio_uses_unit_profile_at_zero_amplitude() {
        // The ratio is a property of the shape, not the amplitude: sigma = 0
        // falls back to the bare unit profile.
        let (data, set) = shell(0.0, 0.5, 0.0);
        let r = shell_ratio(&data, &set).unwrap();
        assert!((r.ratio - 45.0 / 56.0).abs() < 1e-8);
    }

    #[test]
    fn energy_closed_forms() {
        // u = 0 and constant profiles: E = 0.
        let (data, set) = shell(0.0, 0.5, 0.0);
        assert_eq!(energy_e0(&data, &set).value, 0.0);

        // Uniform sharp shell, sigma = 1: E = (rho_bar + p_bar) * 4pi/3 (R0^3 - (R0-ell)^3).
        let (data, set) = shell(1.0, 0.5, 0.0);
        let e = energy_e0(&data, &set).value;
        let p_bar = data.background.pressure(&set);
        let want = (1.0 + p_bar) * FOUR_PI_OVER_3 * (1.0 - 0.125);
        assert!((e - want).abs() < 1e-9, "{e} vs {want}");
    }

    #[test]
    fn energy_scales_with_sigma_squared() {
        let (data, set) = shell(1.0, 0.25, 0.025);
        let e1 = energy_e0(&data, &set).value;
        let e2 = energy_e0(&data.with_sigma(2.0), &set).value;
        assert!((e2 / e1 - 4.0).abs() < 1e-10);
    }

    #[test]
    fn energy_routes_agree() {
        let (data, set) = shell(2.5, 0.25, 0.025);
        let a = energy_e0(&data, &set).value;
        let b = energy_e0_t00(&data, &set).value;
        assert!((a - b).abs() < 1e-8, "{a} vs {b}");
    }

    #[test]
    fn q0_examples() {
        let (data, set) = shell(0.0, 0.5, 0.0);
        assert_eq!(q_initial(&data, &set).value, 0.0);
        let (data, set) = shell(1.5, 0.5, 0.05);
        assert!(q_initial(&data, &set).value > 0.0);
    }

    #[test]
    fn q0_normalized_tends_to_ratio() {
        let (data, set) = shell(1.0, 0.25, 0.025);
        let ratio = shell_ratio(&data, &set).unwrap().ratio;
        let b = 5.0;
        let big = data.with_sigma(1e4);
        let e0 = energy_e0(&big, &set).value;
        let q0 = q_initial(&big, &set).value;
        let lhs = q0 / (big.r0 * (e0 + b * big.r0.powi(3)));
        assert!((lhs - ratio).abs() < 1e-5, "lhs {lhs} ratio {ratio}");
    }

    #[test]
    fn bk_constants_closed_forms() {
        // rho_bar = 1, p1 = 0, Pi0 = 0, Abar = 0 gives b = 4pi/3.
        let (data, set) = shell(1.0, 0.25, 0.0);
        let (b, _) = constants_bk(&set, &data, 0.0);
        assert!((b - FOUR_PI_OVER_3).abs() < 1e-12);

        // p_bar = 1 with p0 = 0, Pi0 = 0, Abar = 0 gives k = 4pi/3.
        let set2 = ConstitutiveSet::ideal_gas(2.0, 1.0);
        let bg2 = ConstantState::new(2.0, 1.0, &set2).unwrap();
        let data2 = ShellData::new(1.0, 0.25, 1.0, 0.0, bg2).unwrap();
        let (_, k) = constants_bk(&set2, &data2, 0.0);
        assert!((k - FOUR_PI_OVER_3).abs() < 1e-12);

        // Both grow monotonically with Abar.
        let (b1, k1) = constants_bk(&set, &data, 1.0);
        let (b2, k2) = constants_bk(&set, &data, 2.0);
        assert!(b2 > b1 && k2 > k1);
    }

    #[test]
    fn mu_integral_against_simpson() {
        // Independent composite-Simpson evaluation of the c = 0 integral.
        let h = |z: f64| 1.0 - (1.0 - z * z).sqrt();
        let (a, b) = (0.5, 1.0);
        let n = 200_000;
        let dz = (b - a) / n as f64;
        let mut acc = 1.0 / h(a) + 1.0 / h(b);
        for i in 1..n {
            let z = a + i as f64 * dz;
            acc += if i % 2 == 1 { 4.0 } else { 2.0 } / h(z);
        }
        let simpson = acc * dz / 3.0;
        let r = mu_for_c(0.0, 0.05).unwrap();
        assert!((r.integral - simpson).abs() < 1e-6, "{} vs {simpson}", r.integral);
        assert!((r.mu - (r.integral.exp() * 1.05)).abs() < 1e-12);
    }

    #[test]
    fn mu_integral_decreases_with_c() {
        // The integration interval [threshold(c), 1] shrinks faster than the
        // integrand grows, so the integral falls monotonically in c.
        let mut prev = f64::INFINITY;
        for i in 0..=9 {
            let c = i as f64 / 10.0;
            let r = mu_for_c(c, 0.05).unwrap();
            assert!(r.integral < prev, "I({c}) = {} not below {prev}", r.integral);
            assert!(r.integral > 0.0);
            prev = r.integral;
        }
        assert!(mu_for_c(1.0, 0.05).is_err());
        assert!(mu_for_c(-0.1, 0.05).is_err());
    }

    #[test]
    fn z0_limits_and_values() {
        for i in 1..10 {
            let c = i as f64 / 10.0;
            let conds = blowup_conditions(1.0, 0.0, 0.0, c, 1.0, 2.0);
            let z0 = conds.z0.unwrap();
            assert!((z0 - 2.0 * c / (c * c + 1.0)).abs() < 1e-12);
        }
        assert_eq!(z0_value(0.0, 0.0), Some(0.0));
        let z = z0_value(0.5, 0.1).unwrap();
        let want = (0.45 + 0.44f64.sqrt()) / 1.25;
        assert!((z - want).abs() < 1e-15);
    }

    #[test]
    fn certificate_for_strong_shell_is_valid() {
        let (data, set) = shell(64.0, 0.1, 0.01);
        let cert = certify(&data, &set, &CertifySpec::default());
        assert!(cert.valid, "reasons: {:?}", cert.reasons);
        assert!(cert.cond1 && cert.cond2 && cert.cond3 && cert.ratio_cond);
        assert!(cert.t_upper > 0.0);
        // h(z) > 0 on the sampled interval is part of cond2's evaluation.
        let conds = blowup_conditions(cert.e0, cert.b, cert.k, cert.c, cert.r0, cert.rbar);
        assert!(conds.h_min > 0.0);
        // Doubling the amplitude keeps the certificate valid.
        let cert2 = certify(&data.with_sigma(128.0), &set, &CertifySpec::default());
        assert!(cert2.valid);
    }

    #[test]
    fn zero_amplitude_fails_cond3() {
        let (data, set) = shell(0.0, 0.1, 0.01);
        let cert = certify(&data, &set, &CertifySpec::default());
        assert!(!cert.valid);
        assert!(!cert.cond3);
        assert!(cert.reasons.iter().any(|r| r.contains("not positive") || r.contains("moment")));
    }

    #[test]
    fn small_velocity_perturbation_keeps_certificate() {
        let (data, set) = shell(64.0, 0.1, 0.01);
        let perturbed = data
            .clone()
            .with_velocity_bump(VelocityBump { amp: 0.05, center: 0.5, width: 0.2 })
            .unwrap();
        let cert = certify(&perturbed, &set, &CertifySpec::default());
        assert!(cert.valid, "reasons: {:?}", cert.reasons);
    }

    #[test]
    fn sigma_search_brackets_and_reruns_identically() {
        let (data, set) = shell(1.0, 0.1, 0.01);
        let spec = CertifySpec::default();
        let a = find_sigma0(&data, &set, (1.0, 512.0), &spec).unwrap();
        let b = find_sigma0(&data, &set, (1.0, 512.0), &spec).unwrap();
        assert_eq!(a.sigma0, b.sigma0);
        assert!(a.certificate.valid);
        // The reported sigma0 is certified and within 1% of the bracket edge.
        let below = certify(&data.with_sigma(a.sigma0 / 1.02), &set, &spec);
        assert!(!below.valid, "sigma0 not minimal within resolution");
        // Doubling stays certified (empirical monotonicity).
        assert!(certify(&data.with_sigma(2.0 * a.sigma0), &set, &spec).valid);
    }

    #[test]
    fn sigma_search_not_found_in_small_range() {
        let (data, set) = shell(1.0, 0.1, 0.01);
        let err = find_sigma0(&data, &set, (1e-3, 2e-3), &CertifySpec::default()).unwrap_err();
        assert!(!err.sweep.is_empty());
        assert!(!err.last_reasons.is_empty());
    }

    #[test]
    fn certificate_round_trips_bit_exactly() {
        let (data, set) = shell(64.0, 0.1, 0.01);
        let mut cert = certify(&data, &set, &CertifySpec::default());
        cert.sigma0 = Some(cert.sigma);
        let text = cert.to_key_values();
        let parsed = Certificate::from_key_values(&text).unwrap();
        assert_eq!(text, parsed.to_key_values());
        assert!(parsed.recheck().is_empty(), "recheck failed: {:?}", parsed.recheck());
    }

    #[test]
    fn recheck_catches_tampering() {
        let (data, set) = shell(64.0, 0.1, 0.01);
        let cert = certify(&data, &set, &CertifySpec::default());
        let mut text = cert.to_key_values();
        text = text.replace(
            &format!("ratio = {:?}", cert.ratio),
            &format!("ratio = {:?}", cert.threshold * 0.5),
        );
        let parsed = Certificate::from_key_values(&text).unwrap();
        assert!(!parsed.recheck().is_empty());
    }
}
