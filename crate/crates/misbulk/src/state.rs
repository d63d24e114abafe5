//! Pointwise fluid states: physical-set membership, the weak energy
//! condition, and stress-energy components on a Minkowski background.

use crate::constitutive::ConstitutiveSet;

/// A pointwise fluid state. Only the spatial velocity is stored; the time
/// component u^0 is always derived from the normalization
/// g_{ab} u^a u^b = -1, so the constraint holds by construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidState {
    pub rho: f64,
    pub n: f64,
    pub pi: f64,
    pub u: [f64; 3],
}

impl FluidState {
    pub fn new(rho: f64, n: f64, pi: f64, u: [f64; 3]) -> Self {
        FluidState { rho, n, pi, u }
    }

    /// One-dimensional convenience constructor (u along the first axis).
    pub fn new_1d(rho: f64, n: f64, pi: f64, u1: f64) -> Self {
        FluidState { rho, n, pi, u: [u1, 0.0, 0.0] }
    }

    pub fn u_norm_sq(&self) -> f64 {
        self.u[0] * self.u[0] + self.u[1] * self.u[1] + self.u[2] * self.u[2]
    }

    pub fn u0(&self) -> f64 {
        (1.0 + self.u_norm_sq()).sqrt()
    }

    /// rho + p + Pi; the inertia of the fluid element. The weak energy
    /// condition is exactly `wec_value >= 0`.
    pub fn wec_value(&self, set: &ConstitutiveSet) -> f64 {
        self.rho + set.pressure(self.rho, self.n) + self.pi
    }
}

/// Spatially homogeneous equilibrium: velocity zero, no bulk stress.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantState {
    pub rho_bar: f64,
    pub n_bar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum ConstantStateError {
    NonPositiveDensity,
    NotStrictlyCausal { cs2: f64 },
}

impl std::fmt::Display for ConstantStateError {
    fn fmt(&self, out: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ConstantStateError::NonPositiveDensity => {
                write!(out, "background densities must be positive")
            }
            ConstantStateError::NotStrictlyCausal { cs2 } => {
                write!(out, "background sound speed squared {cs2} not in (0, 1)")
            }
        }
    }
}

impl std::error::Error for ConstantStateError {}

impl ConstantState {
    /// Checks that the background is a physical state for `set`.
    pub fn new(rho_bar: f64, n_bar: f64, set: &ConstitutiveSet) -> Result<Self, ConstantStateError> {
        if rho_bar <= 0.0 || n_bar <= 0.0 {
            return Err(ConstantStateError::NonPositiveDensity);
        }
        let cs2 = set
            .sound_speed_sq(rho_bar, n_bar, 0.0)
            .map_err(|_| ConstantStateError::NotStrictlyCausal { cs2: f64::NAN })?;
        if cs2 <= 0.0 || cs2 >= 1.0 {
            return Err(ConstantStateError::NotStrictlyCausal { cs2 });
        }
        Ok(ConstantState { rho_bar, n_bar })
    }

    pub fn pressure(&self, set: &ConstitutiveSet) -> f64 {
        set.pressure(self.rho_bar, self.n_bar)
    }

    /// Background sound speed c = c_s(rho_bar, n_bar, 0).
    pub fn sound_speed(&self, set: &ConstitutiveSet) -> f64 {
        set.sound_speed_sq_raw(self.rho_bar, self.n_bar, 0.0).sqrt()
    }

    pub fn state(&self) -> FluidState {
        FluidState::new(self.rho_bar, self.n_bar, 0.0, [0.0; 3])
    }
}

/// Physical-set membership with its margin.
#[derive(Debug, Clone, Copy)]
pub struct PhysicalMargin {
    pub physical: bool,
    /// Minimum slack among rho, n, cs2, 1 - cs2; negative when outside.
    pub min_slack: f64,
    pub cs2: f64,
}

/// A state is physical when rho > 0, n > 0 and the sound speed is strictly
/// causal, 0 < c_s^2 < 1. Degenerate inertia counts as non-physical.
pub fn is_physical(state: &FluidState, set: &ConstitutiveSet) -> PhysicalMargin {
    match set.sound_speed_sq(state.rho, state.n, state.pi) {
        Ok(cs2) => {
            let min_slack = state.rho.min(state.n).min(cs2).min(1.0 - cs2);
            PhysicalMargin { physical: min_slack > 0.0, min_slack, cs2 }
        }
        Err(_) => PhysicalMargin { physical: false, min_slack: f64::NEG_INFINITY, cs2: f64::NAN },
    }
}

/// Stress-energy components in Cartesian Minkowski coordinates,
/// T^{ab} = rho u^a u^b + (p + Pi)(g^{ab} + u^a u^b).
#[derive(Debug, Clone, Copy)]
pub struct StressEnergy {
    pub t00: f64,
    pub t0k: [f64; 3],
    pub tjk: [[f64; 3]; 3],
}

impl StressEnergy {
    /// Contraction T^{ab} v_a v_b for a covector v = (v0, v1, v2, v3).
    pub fn contract(&self, v: [f64; 4]) -> f64 {
        let mut s = self.t00 * v[0] * v[0];
        for k in 0..3 {
            s += 2.0 * self.t0k[k] * v[0] * v[k + 1];
            for j in 0..3 {
                s += self.tjk[j][k] * v[j + 1] * v[k + 1];
            }
        }
        s
    }
}

pub fn stress_energy(state: &FluidState, set: &ConstitutiveSet) -> StressEnergy {
    let q = set.pressure(state.rho, state.n) + state.pi;
    let u0 = state.u0();
    let e = state.rho + q;
    let t00 = e * u0 * u0 - q;
    let mut t0k = [0.0; 3];
    let mut tjk = [[0.0; 3]; 3];
    for k in 0..3 {
        t0k[k] = e * u0 * state.u[k];
        for j in 0..3 {
            tjk[j][k] = e * state.u[j] * state.u[k] + if j == k { q } else { 0.0 };
        }
    }
    StressEnergy { t00, t0k, tjk }
}
