//! Constitutive relations: equation of state p(rho, n), bulk viscosity
//! coefficient zeta(rho, n), relaxation time tau0(rho, n) and the nonlinear
//! transport coefficient lambda(rho, n), together with the sound speeds and
//! the structural checks the breakdown analysis relies on.
//!
//! Functional forms come from a closed registry of analytic families plus
//! tabulated inputs with monotone-cubic interpolation. Analytic partials are
//! used where available; otherwise central differences with step
//! `1e-6 * (1 + |x|)`.

use crate::quad::{self, HalflineError};
use crate::table::MonotoneTable;

/// Equation-of-state families.
#[derive(Debug, Clone, PartialEq)]
pub enum EosFamily {
    /// p = (gamma_ad - 1) (rho - m n); the classical ideal-gas closure.
    IdealGas { gamma_ad: f64, m: f64 },
    /// p = c_rho * rho + c_n * n + offset. Covers constant pressure
    /// (c_rho = c_n = 0) and the conformal case p = rho / 3.
    Linear { c_rho: f64, c_n: f64, offset: f64 },
    /// Barotropic table p(rho); derivatives from the interpolant.
    TableRho(MonotoneTable),
}

impl EosFamily {
    pub fn pressure(&self, rho: f64, n: f64) -> f64 {
        match self {
            EosFamily::IdealGas { gamma_ad, m } => (gamma_ad - 1.0) * (rho - m * n),
            EosFamily::Linear { c_rho, c_n, offset } => c_rho * rho + c_n * n + offset,
            EosFamily::TableRho(t) => t.value(rho),
        }
    }

    pub fn dp_drho(&self, rho: f64, _n: f64) -> f64 {
        match self {
            EosFamily::IdealGas { gamma_ad, .. } => gamma_ad - 1.0,
            EosFamily::Linear { c_rho, .. } => *c_rho,
            EosFamily::TableRho(t) => t.derivative(rho),
        }
    }

    pub fn dp_dn(&self, _rho: f64, _n: f64) -> f64 {
        match self {
            EosFamily::IdealGas { gamma_ad, m } => -(gamma_ad - 1.0) * m,
            EosFamily::Linear { c_n, .. } => *c_n,
            EosFamily::TableRho(_) => 0.0,
        }
    }
}

/// Families for the transport coefficients zeta and tau0.
#[derive(Debug, Clone, PartialEq)]
pub enum TransportFamily {
    Zero,
    Constant(f64),
    /// coeff * n^n_exp * exp(-decay * n) * (1 + rho_amp * tanh(rho / rho_scale)).
    ///
    /// decay = 0 gives a plain power law; rho_amp = 0 removes the density
    /// dependence. The tanh factor keeps the density dependence bounded and
    /// monotone, which is what the transport checks require.
    PowerExp { coeff: f64, n_exp: f64, decay: f64, rho_amp: f64, rho_scale: f64 },
    /// Tabulated function of n; zero outside the tabulated range.
    TableN(MonotoneTable),
}

impl TransportFamily {
    pub fn power(coeff: f64, n_exp: f64, decay: f64) -> Self {
        TransportFamily::PowerExp { coeff, n_exp, decay, rho_amp: 0.0, rho_scale: 1.0 }
    }

    /// Supremum over the whole (rho, n) domain. Analytic for the closed
    /// families, a conservative scan for tables.
    pub fn sup(&self) -> f64 {
        match self {
            TransportFamily::Zero => 0.0,
            TransportFamily::Constant(v) => v.abs(),
            TransportFamily::PowerExp { coeff, n_exp, decay, rho_amp, .. } => {
                let base = if *decay < 0.0 || *n_exp < 0.0 || (*decay == 0.0 && *n_exp > 0.0) {
                    f64::INFINITY
                } else if *n_exp == 0.0 {
                    1.0
                } else {
                    // Max of n^k e^{-d n} at n = k/d.
                    (n_exp / decay).powf(*n_exp) * (-n_exp).exp()
                };
                coeff.abs() * base * (1.0 + rho_amp.abs())
            }
            TransportFamily::TableN(t) => {
                let (lo, hi) = t.range();
                let mut best = 0.0f64;
                for i in 0..=4000 {
                    let n = lo + (hi - lo) * i as f64 / 4000.0;
                    best = best.max(t.value(n).abs());
                }
                best
            }
        }
    }

    pub fn eval(&self, rho: f64, n: f64) -> f64 {
        match self {
            TransportFamily::Zero => 0.0,
            TransportFamily::Constant(v) => *v,
            TransportFamily::PowerExp { coeff, n_exp, decay, rho_amp, rho_scale } => {
                if *coeff == 0.0 || n <= 0.0 {
                    return 0.0;
                }
                // Work in log space so huge n cannot produce inf * 0.
                let log_mag = coeff.abs().ln() + n_exp * n.ln() - decay * n;
                if log_mag < -745.0 {
                    return 0.0;
                }
                let base = coeff.signum() * log_mag.exp();
                base * (1.0 + rho_amp * (rho / rho_scale).tanh())
            }
            TransportFamily::TableN(t) => t.value(n),
        }
    }
}

/// The nonlinear transport coefficient; either identically zero or a
/// positive constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LambdaFamily {
    Zero,
    Constant(f64),
}

impl LambdaFamily {
    pub fn eval(&self) -> f64 {
        match self {
            LambdaFamily::Zero => 0.0,
            LambdaFamily::Constant(v) => *v,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, LambdaFamily::Zero) || matches!(self, LambdaFamily::Constant(v) if *v == 0.0)
    }
}

/// Signals a degenerate inertia rho + p + Pi = 0 in a sound-speed
/// evaluation. Whether this counts as a breakdown is the caller's call.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DegenerateInertia {
    pub rho: f64,
    pub n: f64,
    pub pi: f64,
}

impl std::fmt::Display for DegenerateInertia {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            out,
            "degenerate inertia rho+p+Pi = 0 at rho={}, n={}, Pi={}",
            self.rho, self.n, self.pi
        )
    }
}

impl std::error::Error for DegenerateInertia {}

/// A complete constitutive set with its declared structural constants.
#[derive(Debug, Clone, PartialEq)]
pub struct ConstitutiveSet {
    pub eos: EosFamily,
    pub zeta: TransportFamily,
    pub tau0: TransportFamily,
    pub lambda: LambdaFamily,
    /// Declared lower pressure bound: p > -p0 on physical states.
    pub p0: f64,
    /// Declared upper pressure margin: p <= rho + p1 on physical states.
    pub p1: f64,
    /// Declared relaxation-time floor: tau0 >= tau0_floor > 0.
    pub tau0_floor: f64,
}

impl ConstitutiveSet {
    /// Ideal gas with no viscosity; the simplest fully compliant set.
    pub fn ideal_gas(gamma_ad: f64, m: f64) -> Self {
        ConstitutiveSet {
            eos: EosFamily::IdealGas { gamma_ad, m },
            zeta: TransportFamily::Zero,
            tau0: TransportFamily::Constant(1.0),
            lambda: LambdaFamily::Zero,
            p0: 0.0,
            p1: 0.0,
            tau0_floor: 1.0,
        }
    }

    pub fn with_transport(mut self, zeta: TransportFamily, tau0: TransportFamily) -> Self {
        if let TransportFamily::Constant(v) = tau0 {
            self.tau0_floor = v;
        }
        self.zeta = zeta;
        self.tau0 = tau0;
        self.raise_pressure_floor();
        self
    }

    /// Bulk viscosity widens the physical set into negative-pressure
    /// territory: for the ideal gas, c_s^2 > 0 on states with positive
    /// inertia forces (gamma-1)(m n - rho) < (zeta/tau0)/gamma_ad, so the
    /// honest lower pressure declaration is sup(zeta/tau0)/gamma_ad. Raises
    /// the declared p0 to at least that value (never lowers it).
    pub fn raise_pressure_floor(&mut self) {
        if let EosFamily::IdealGas { gamma_ad, m } = self.eos {
            if m > 0.0 {
                let sup_ratio = match (&self.zeta, &self.tau0) {
                    (z, TransportFamily::Constant(v)) if *v > 0.0 => z.sup() / v,
                    (z, _) => z.sup() / self.tau0_floor,
                };
                self.p0 = self.p0.max(sup_ratio / gamma_ad);
            }
        }
    }

    pub fn with_lambda(mut self, lambda: LambdaFamily) -> Self {
        self.lambda = lambda;
        self
    }

    pub fn pressure(&self, rho: f64, n: f64) -> f64 {
        self.eos.pressure(rho, n)
    }

    pub fn dp_drho(&self, rho: f64, n: f64) -> f64 {
        self.eos.dp_drho(rho, n)
    }

    pub fn dp_dn(&self, rho: f64, n: f64) -> f64 {
        self.eos.dp_dn(rho, n)
    }

    pub fn zeta(&self, rho: f64, n: f64) -> f64 {
        self.zeta.eval(rho, n)
    }

    pub fn tau0(&self, rho: f64, n: f64) -> f64 {
        self.tau0.eval(rho, n)
    }

    pub fn lambda(&self, _rho: f64, _n: f64) -> f64 {
        self.lambda.eval()
    }

    pub fn zeta_over_tau0(&self, rho: f64, n: f64) -> f64 {
        let z = self.zeta(rho, n);
        if z == 0.0 {
            return 0.0;
        }
        z / self.tau0(rho, n)
    }

    /// Viscous sound speed squared:
    /// zeta / (tau0 (rho+p+Pi)) + dp/drho + n dp/dn / (rho+p+Pi).
    pub fn sound_speed_sq(&self, rho: f64, n: f64, pi: f64) -> Result<f64, DegenerateInertia> {
        let e = rho + self.pressure(rho, n) + pi;
        if e == 0.0 {
            return Err(DegenerateInertia { rho, n, pi });
        }
        Ok(self.zeta_over_tau0(rho, n) / e + self.dp_drho(rho, n) + n * self.dp_dn(rho, n) / e)
    }

    /// Infallible variant for hot loops; degenerate inertia yields +-inf/NaN
    /// which downstream monitors treat as leaving the physical set.
    pub fn sound_speed_sq_raw(&self, rho: f64, n: f64, pi: f64) -> f64 {
        let e = rho + self.pressure(rho, n) + pi;
        self.zeta_over_tau0(rho, n) / e + self.dp_drho(rho, n) + n * self.dp_dn(rho, n) / e
    }

    /// Perfect-fluid sound speed squared: dp/drho + n dp/dn / (rho+p).
    pub fn euler_sound_speed_sq(&self, rho: f64, n: f64) -> Result<f64, DegenerateInertia> {
        let e = rho + self.pressure(rho, n);
        if e == 0.0 {
            return Err(DegenerateInertia { rho, n, pi: 0.0 });
        }
        Ok(self.dp_drho(rho, n) + n * self.dp_dn(rho, n) / e)
    }

    /// Whether (rho, n) with Pi = 0 lies in the physical region used by the
    /// structural checks: positive densities and strictly causal sound speed.
    pub fn physical_sample(&self, rho: f64, n: f64) -> bool {
        if rho <= 0.0 || n <= 0.0 {
            return false;
        }
        match self.sound_speed_sq(rho, n, 0.0) {
            Ok(cs2) => cs2 > 0.0 && cs2 < 1.0,
            Err(_) => false,
        }
    }
}

/// Central finite difference with the registry's default step.
pub(crate) fn central_diff<F: Fn(f64) -> f64>(f: F, x: f64) -> f64 {
    let h = 1e-6 * (1.0 + x.abs());
    (f(x + h) - f(x - h)) / (2.0 * h)
}

/// Sampling rectangle and resolution for [`validate_assumptions`].
#[derive(Debug, Clone, Copy)]
pub struct SampleSpec {
    pub rho_range: (f64, f64),
    pub n_range: (f64, f64),
    pub rho_samples: usize,
    pub n_samples: usize,
    /// Surrogate bound for the global-Lipschitz requirement on p; checked as
    /// |grad p| <= bound over the rectangle.
    pub lipschitz_bound: f64,
    /// Surrogate bound for the partials of zeta/tau0.
    pub ratio_partials_bound: f64,
}

impl Default for SampleSpec {
    fn default() -> Self {
        SampleSpec {
            rho_range: (-5.0, 10.0),
            n_range: (1e-3, 10.0),
            rho_samples: 41,
            n_samples: 41,
            lipschitz_bound: 1e3,
            ratio_partials_bound: 1e3,
        }
    }
}

/// Which structural requirement a violation belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckKind {
    /// -rho <= p <= rho + p1 and p > -p0 on physical samples.
    PressureWindow,
    /// Nonvanishing dp/drho and dp/dn on physical samples.
    PressureSlopes,
    /// |grad p| bounded over the rectangle (Lipschitz surrogate).
    PressureLipschitz,
    /// zeta >= 0 everywhere sampled.
    ViscositySign,
    /// tau0 >= declared floor everywhere sampled.
    RelaxationFloor,
    /// d(zeta/tau0)/drho >= 0 everywhere sampled.
    RatioMonotone,
    /// |d(zeta/tau0)/drho| + |d(zeta/tau0)/dn| bounded.
    RatioPartialsBounded,
    /// If lambda > 0: p + rho < 1/lambda on physical samples.
    NonlinearBound,
}

impl std::fmt::Display for CheckKind {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            CheckKind::PressureWindow => "pressure window",
            CheckKind::PressureSlopes => "pressure slopes",
            CheckKind::PressureLipschitz => "pressure Lipschitz surrogate",
            CheckKind::ViscositySign => "viscosity sign",
            CheckKind::RelaxationFloor => "relaxation-time floor",
            CheckKind::RatioMonotone => "zeta/tau0 monotonicity in rho",
            CheckKind::RatioPartialsBounded => "zeta/tau0 bounded partials",
            CheckKind::NonlinearBound => "nonlinear coefficient bound",
        };
        write!(out, "{name}")
    }
}

#[derive(Debug, Clone)]
pub struct Violation {
    pub check: CheckKind,
    pub rho: f64,
    pub n: f64,
    pub detail: String,
}

/// Outcome of the sampled structural validation.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub spec: SampleSpec,
    pub physical_samples: usize,
    pub total_samples: usize,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Samples the declared rectangle and checks every structural inequality the
/// breakdown analysis assumes. Violations are report entries, never errors.
pub fn validate_assumptions(set: &ConstitutiveSet, spec: &SampleSpec) -> ValidationReport {
    let mut violations = Vec::new();
    let mut physical = 0usize;
    let mut total = 0usize;
    let (r_lo, r_hi) = spec.rho_range;
    let (n_lo, n_hi) = spec.n_range;
    let inv_lambda_checked = !set.lambda.is_zero();
    for i in 0..spec.rho_samples {
        let rho = if spec.rho_samples == 1 {
            r_lo
        } else {
            r_lo + (r_hi - r_lo) * i as f64 / (spec.rho_samples - 1) as f64
        };
        for j in 0..spec.n_samples {
            let n = if spec.n_samples == 1 {
                n_lo
            } else {
                n_lo + (n_hi - n_lo) * j as f64 / (spec.n_samples - 1) as f64
            };
            total += 1;
            let p = set.pressure(rho, n);
            let is_physical = set.physical_sample(rho, n);
            if is_physical {
                physical += 1;
                if p < -rho || p > rho + set.p1 {
                    violations.push(Violation {
                        check: CheckKind::PressureWindow,
                        rho,
                        n,
                        detail: format!("p = {p} outside [-rho, rho + p1]"),
                    });
                }
                if p <= -set.p0 {
                    violations.push(Violation {
                        check: CheckKind::PressureWindow,
                        rho,
                        n,
                        detail: format!("p = {p} <= -p0 = {}", -set.p0),
                    });
                }
                if set.dp_drho(rho, n) == 0.0 {
                    violations.push(Violation {
                        check: CheckKind::PressureSlopes,
                        rho,
                        n,
                        detail: "dp/drho vanishes".to_string(),
                    });
                }
                if set.dp_dn(rho, n) == 0.0 {
                    violations.push(Violation {
                        check: CheckKind::PressureSlopes,
                        rho,
                        n,
                        detail: "dp/dn vanishes".to_string(),
                    });
                }
                if inv_lambda_checked {
                    let lam = set.lambda(rho, n);
                    if lam > 0.0 && p + rho >= 1.0 / lam {
                        violations.push(Violation {
                            check: CheckKind::NonlinearBound,
                            rho,
                            n,
                            detail: format!("p + rho = {} >= 1/lambda = {}", p + rho, 1.0 / lam),
                        });
                    }
                }
            }
            let grad = (set.dp_drho(rho, n).powi(2) + set.dp_dn(rho, n).powi(2)).sqrt();
            if grad > spec.lipschitz_bound {
                violations.push(Violation {
                    check: CheckKind::PressureLipschitz,
                    rho,
                    n,
                    detail: format!("|grad p| = {grad} exceeds declared bound"),
                });
            }
            let z = set.zeta(rho, n);
            if z < 0.0 {
                violations.push(Violation {
                    check: CheckKind::ViscositySign,
                    rho,
                    n,
                    detail: format!("zeta = {z} < 0"),
                });
            }
            let tau = set.tau0(rho, n);
            if tau < set.tau0_floor || set.tau0_floor <= 0.0 {
                violations.push(Violation {
                    check: CheckKind::RelaxationFloor,
                    rho,
                    n,
                    detail: format!("tau0 = {tau} below declared floor {}", set.tau0_floor),
                });
            }
            let dr = central_diff(|r| set.zeta_over_tau0(r, n), rho);
            // Finite-difference noise floor; the monotonicity requirement is
            // a sign condition, not an accuracy condition.
            if dr < -1e-8 * (1.0 + set.zeta_over_tau0(rho, n).abs()) {
                violations.push(Violation {
                    check: CheckKind::RatioMonotone,
                    rho,
                    n,
                    detail: format!("d(zeta/tau0)/drho = {dr} < 0"),
                });
            }
            let dn = central_diff(|m| set.zeta_over_tau0(rho, m.max(1e-12)), n);
            if dr.abs() + dn.abs() > spec.ratio_partials_bound {
                violations.push(Violation {
                    check: CheckKind::RatioPartialsBounded,
                    rho,
                    n,
                    detail: format!("|partials of zeta/tau0| = {} exceed bound", dr.abs() + dn.abs()),
                });
            }
        }
    }
    ValidationReport { violations, spec: *spec, physical_samples: physical, total_samples: total }
}

/// How to estimate the integral bound on zeta/tau0.
#[derive(Debug, Clone, Copy)]
pub struct AbarSpec {
    /// Interval over which the inner supremum in rho is sampled. The true
    /// supremum ranges over all of R; the report records the interval used.
    pub rho_interval: (f64, f64),
    pub rho_samples: usize,
    pub tol: f64,
    /// Multiplicative safety factor applied to the quadrature result.
    pub safety: f64,
}

impl Default for AbarSpec {
    fn default() -> Self {
        AbarSpec { rho_interval: (-10.0, 10.0), rho_samples: 33, tol: 1e-8, safety: 0.0 }
    }
}

impl AbarSpec {
    /// Default interval scaled to a background density.
    pub fn for_background(rho_bar: f64) -> Self {
        AbarSpec { rho_interval: (-10.0 * rho_bar.abs(), 10.0 * rho_bar.abs()), ..Default::default() }
    }
}

/// Upper estimate of the transport bound integral, with provenance.
#[derive(Debug, Clone, Copy)]
pub struct AbarEstimate {
    pub value: f64,
    pub quad_error: f64,
    pub spec_used: AbarSpec,
}

/// Numerically estimates the constant bounding
/// `integral over n of sup_rho |zeta/tau0| / n`.
///
/// A divergent integral is reported as an error: the a-priori machinery
/// downstream is unavailable in that case.
pub fn abar_bound(set: &ConstitutiveSet, spec: &AbarSpec) -> Result<AbarEstimate, HalflineError> {
    let (lo, hi) = spec.rho_interval;
    let m = spec.rho_samples.max(2);
    let sup = |n: f64| {
        let mut best = 0.0f64;
        for i in 0..m {
            let rho = lo + (hi - lo) * i as f64 / (m - 1) as f64;
            best = best.max(set.zeta_over_tau0(rho, n).abs());
        }
        best
    };
    let r = quad::integrate_log_halfline(|n| sup(n) / n, spec.tol)?;
    Ok(AbarEstimate {
        value: r.value * (1.0 + spec.safety),
        quad_error: r.error,
        spec_used: *spec,
    })
}
