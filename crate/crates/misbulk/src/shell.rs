//! The localized shell initial-data family.
//!
//! Data equal a constant background outside the ball of radius `r0`; inside,
//! the velocity is a radial outward shell `sigma * u1(r) * x/|x|` where the
//! unit profile u1 equals 1 on [r0 - ell + smooth_w, r0 - smooth_w] and is
//! mollified to zero at both ends with C-infinity transitions of width
//! `smooth_w`. Density, particle number and bulk stress profiles default to
//! the background values but may carry smooth radial bumps.

use crate::state::{ConstantState, FluidState};

/// C-infinity step: 0 for s <= 0, 1 for s >= 1.
pub fn smooth_step(s: f64) -> f64 {
    if s <= 0.0 {
        0.0
    } else if s >= 1.0 {
        1.0
    } else {
        let a = (-1.0 / s).exp();
        let b = (-1.0 / (1.0 - s)).exp();
        a / (a + b)
    }
}

/// Standard C-infinity bump, 1 at x = 0, supported on |x| < 1.
pub fn smooth_bump(x: f64) -> f64 {
    if x.abs() >= 1.0 {
        0.0
    } else {
        (1.0 - 1.0 / (1.0 - x * x)).exp()
    }
}

/// Radial scalar profile.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RadialProfile {
    Constant(f64),
    /// base + amp * bump((r - center)/width).
    WithBump { base: f64, amp: f64, center: f64, width: f64 },
}

impl RadialProfile {
    pub fn eval(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Constant(v) => *v,
            RadialProfile::WithBump { base, amp, center, width } => {
                base + amp * smooth_bump((r - center) / width)
            }
        }
    }

    fn breakpoints(&self, out: &mut Vec<f64>) {
        if let RadialProfile::WithBump { center, width, .. } = self {
            out.push(center - width);
            out.push(*center);
            out.push(center + width);
        }
    }
}

/// Optional smooth velocity perturbation (for stability re-runs).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VelocityBump {
    pub amp: f64,
    pub center: f64,
    pub width: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShellError {
    BadRadii { r0: f64, ell: f64 },
    BadMollifierWidth { smooth_w: f64, ell: f64 },
    NegativeAmplitude { sigma: f64 },
    BumpOutsideBall,
}

impl std::fmt::Display for ShellError {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ShellError::BadRadii { r0, ell } => {
                write!(out, "need 0 < ell < r0, got r0 = {r0}, ell = {ell}")
            }
            ShellError::BadMollifierWidth { smooth_w, ell } => {
                write!(out, "need 0 <= smooth_w < ell/2, got smooth_w = {smooth_w}, ell = {ell}")
            }
            ShellError::NegativeAmplitude { sigma } => {
                write!(out, "velocity amplitude must be nonnegative, got {sigma}")
            }
            ShellError::BumpOutsideBall => {
                write!(out, "profile bumps must be supported strictly inside the ball")
            }
        }
    }
}

impl std::error::Error for ShellError {}

/// Shell initial data: background plus an outward-moving mollified shell.
///
/// The shell occupies [r0 - standoff - ell, r0 - standoff]; the default
/// standoff of zero puts its outer edge exactly at r0. A positive standoff
/// keeps the support strictly inside the ball (everything the breakdown
/// argument needs) while buying the finite-difference evolution a buffer
/// between the data and the causal ball it must not leak out of.
#[derive(Debug, Clone, PartialEq)]
pub struct ShellData {
    pub r0: f64,
    pub ell: f64,
    pub sigma: f64,
    pub smooth_w: f64,
    pub standoff: f64,
    pub background: ConstantState,
    pub rho_profile: RadialProfile,
    pub n_profile: RadialProfile,
    pub pi_profile: RadialProfile,
    pub velocity_bump: Option<VelocityBump>,
}

impl ShellData {
    pub fn new(
        r0: f64,
        ell: f64,
        sigma: f64,
        smooth_w: f64,
        background: ConstantState,
    ) -> Result<Self, ShellError> {
        if r0.is_nan() || ell.is_nan() || r0 <= 0.0 || ell <= 0.0 || ell >= r0 {
            return Err(ShellError::BadRadii { r0, ell });
        }
        if smooth_w < 0.0 || smooth_w >= 0.5 * ell {
            return Err(ShellError::BadMollifierWidth { smooth_w, ell });
        }
        if sigma < 0.0 {
            return Err(ShellError::NegativeAmplitude { sigma });
        }
        Ok(ShellData {
            r0,
            ell,
            sigma,
            smooth_w,
            standoff: 0.0,
            background,
            rho_profile: RadialProfile::Constant(background.rho_bar),
            n_profile: RadialProfile::Constant(background.n_bar),
            pi_profile: RadialProfile::Constant(0.0),
            velocity_bump: None,
        })
    }

    pub fn with_sigma(&self, sigma: f64) -> Self {
        ShellData { sigma, ..self.clone() }
    }

    /// Moves the shell inward so its outer edge sits at r0 - standoff.
    pub fn with_standoff(mut self, standoff: f64) -> Result<Self, ShellError> {
        if standoff < 0.0 || standoff + self.ell >= self.r0 {
            return Err(ShellError::BadRadii { r0: self.r0, ell: self.ell + standoff });
        }
        self.standoff = standoff;
        Ok(self)
    }

    pub fn with_velocity_bump(mut self, bump: VelocityBump) -> Result<Self, ShellError> {
        if bump.center - bump.width <= 0.0 || bump.center + bump.width >= self.r0 {
            return Err(ShellError::BumpOutsideBall);
        }
        self.velocity_bump = Some(bump);
        Ok(self)
    }

    /// Unit-amplitude velocity profile: 1 on the shell plateau, mollified to
    /// 0 at both edges, identically 0 outside the shell support.
    pub fn u1(&self, r: f64) -> f64 {
        let b = self.r0 - self.standoff;
        let a = b - self.ell;
        if self.smooth_w == 0.0 {
            return if (a..=b).contains(&r) { 1.0 } else { 0.0 };
        }
        smooth_step((r - a) / self.smooth_w) * smooth_step((b - r) / self.smooth_w)
    }

    /// Full radial velocity u^r at radius r, including any perturbation.
    pub fn velocity(&self, r: f64) -> f64 {
        let mut v = self.sigma * self.u1(r);
        if let Some(bump) = self.velocity_bump {
            v += bump.amp * smooth_bump((r - bump.center) / bump.width);
        }
        v
    }

    /// Velocity shape used in the shell-ratio integrals (velocity divided by
    /// sigma when sigma > 0, the bare unit profile otherwise).
    pub fn unit_velocity(&self, r: f64) -> f64 {
        if self.sigma > 0.0 {
            self.velocity(r) / self.sigma
        } else {
            self.u1(r)
        }
    }

    pub fn rho_ring(&self, r: f64) -> f64 {
        self.rho_profile.eval(r)
    }

    pub fn n_ring(&self, r: f64) -> f64 {
        self.n_profile.eval(r)
    }

    pub fn pi_ring(&self, r: f64) -> f64 {
        self.pi_profile.eval(r)
    }

    /// Pointwise initial state at radius r (radial velocity along the first
    /// axis slot).
    pub fn state_at(&self, r: f64, set: &crate::constitutive::ConstitutiveSet) -> FluidState {
        let _ = set;
        if r >= self.r0 {
            return self.background.state();
        }
        FluidState::new_1d(self.rho_ring(r), self.n_ring(r), self.pi_ring(r), self.velocity(r))
    }

    /// Radii where the integrands change character; quadratures split here.
    pub fn breakpoints(&self) -> Vec<f64> {
        let outer = self.r0 - self.standoff;
        let mut pts = vec![
            0.0,
            outer - self.ell,
            outer - self.ell + self.smooth_w,
            outer - self.smooth_w,
            outer,
            self.r0,
        ];
        self.rho_profile.breakpoints(&mut pts);
        self.n_profile.breakpoints(&mut pts);
        self.pi_profile.breakpoints(&mut pts);
        if let Some(b) = self.velocity_bump {
            pts.push(b.center - b.width);
            pts.push(b.center);
            pts.push(b.center + b.width);
        }
        pts.retain(|&r| (0.0..=self.r0).contains(&r));
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constitutive::ConstitutiveSet;

    fn shell() -> ShellData {
        let set = ConstitutiveSet::ideal_gas(2.0, 1.0);
        let bg = ConstantState::new(2.0, 1.0, &set).unwrap();
        ShellData::new(1.0, 0.25, 3.0, 0.025, bg).unwrap()
    }

    #[test]
    fn unit_profile_plateau_and_support() {
        let d = shell();
        assert_eq!(d.u1(1.0), 0.0);
        assert_eq!(d.u1(0.74), 0.0);
        assert_eq!(d.u1(1.2), 0.0);
        assert_eq!(d.u1(0.75 + 0.025), 1.0);
        assert_eq!(d.u1(1.0 - 0.025), 1.0);
        assert_eq!(d.u1(0.875), 1.0);
        let mid = d.u1(0.75 + 0.0125);
        assert!(mid > 0.0 && mid < 1.0);
    }

    #[test]
    fn profile_is_smoothly_monotone_on_ramps() {
        let d = shell();
        let mut prev = 0.0;
        for i in 0..=100 {
            let r = 0.75 + 0.025 * i as f64 / 100.0;
            let v = d.u1(r);
            assert!(v >= prev - 1e-15);
            prev = v;
        }
    }

    #[test]
    fn sharp_profile_when_width_zero() {
        let set = ConstitutiveSet::ideal_gas(2.0, 1.0);
        let bg = ConstantState::new(2.0, 1.0, &set).unwrap();
        let d = ShellData::new(1.0, 0.5, 1.0, 0.0, bg).unwrap();
        assert_eq!(d.u1(0.5), 1.0);
        assert_eq!(d.u1(0.49), 0.0);
        assert_eq!(d.u1(0.75), 1.0);
    }

    #[test]
    fn state_matches_background_outside() {
        let set = ConstitutiveSet::ideal_gas(2.0, 1.0);
        let d = shell();
        let s = d.state_at(1.5, &set);
        assert_eq!(s.rho, 2.0);
        assert_eq!(s.u[0], 0.0);
        let inner = d.state_at(0.9, &set);
        assert_eq!(inner.u[0], 3.0 * d.u1(0.9));
    }

    #[test]
    fn constructor_validates() {
        let set = ConstitutiveSet::ideal_gas(2.0, 1.0);
        let bg = ConstantState::new(2.0, 1.0, &set).unwrap();
        assert!(ShellData::new(1.0, 1.5, 1.0, 0.0, bg).is_err());
        assert!(ShellData::new(1.0, 0.2, 1.0, 0.15, bg).is_err());
        assert!(ShellData::new(1.0, 0.2, -1.0, 0.01, bg).is_err());
    }
}
