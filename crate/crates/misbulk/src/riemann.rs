//! Characteristic analysis of the 1+1 system in the variables
//! Psi = (rho, u^1, q) with q = Pi + p, for barotropic constitutive
//! relations (p, zeta, tau0 functions of rho only): eigenvalues, left
//! eigenvectors, and the obstruction to Riemann invariants.

use crate::constitutive::{ConstitutiveSet, DegenerateInertia};
use crate::state::FluidState;

/// The acoustic speed entering the 1+1 quasilinear form:
/// c^2 = dp/drho + zeta / (tau0 (rho + q)).
///
/// The particle density enters only through the constitutive evaluations
/// and is inert in barotropic mode.
pub fn barotropic_sound_speed_sq(set: &ConstitutiveSet, rho: f64, n: f64, q: f64) -> f64 {
    set.dp_drho(rho, n) + set.zeta_over_tau0(rho, n) / (rho + q)
}

/// Eigenvalues and left eigenvectors of (A^0)^-1 A^1 over Psi = (rho, u1, q).
#[derive(Debug, Clone, Copy)]
pub struct EigenSystem {
    pub lambdas: [f64; 3],
    /// Rows are the left eigenvectors l^1, l^2, l^3.
    pub left: [[f64; 3]; 3],
    pub c: f64,
    /// h = (rho + q) c / u^0, the u1-component of l^2.
    pub h: f64,
}

impl EigenSystem {
    /// Determinant of the stacked left eigenvectors,
    /// -2 (rho + q) c^3 / u^0; nonzero whenever c > 0 and rho + q > 0.
    pub fn det_left(&self) -> f64 {
        -2.0 * self.h * self.c * self.c
    }
}

/// Characteristic speeds and left eigenvectors at a state.
///
/// The flow eigenvalue is u1/u0; the acoustic pair is the relativistic
/// velocity composition of u1/u0 with +-c. |c u1| < u0 holds for c <= 1, so
/// the denominators cannot vanish on physical states.
pub fn eigensystem(state: &FluidState, set: &ConstitutiveSet) -> EigenSystem {
    let rho = state.rho;
    let q = set.pressure(rho, state.n) + state.pi;
    let c2 = barotropic_sound_speed_sq(set, rho, state.n, q);
    assert!(c2 >= 0.0, "acoustic speed squared {c2} negative");
    let c = c2.sqrt();
    let u0 = state.u0();
    let u1 = state.u[0];
    assert!(
        (c * u1 + u0) != 0.0 && (c * u1 - u0) != 0.0,
        "acoustic denominators vanish only for superluminal c"
    );
    let lambdas = [u1 / u0, (u1 + c * u0) / (c * u1 + u0), (-u1 + c * u0) / (c * u1 - u0)];
    let h = (rho + q) * c / u0;
    let left = [[-c2, 0.0, 1.0], [0.0, h, 1.0], [0.0, -h, 1.0]];
    EigenSystem { lambdas, left, c, h }
}

/// Max row-wise residual |l^A ((A^0)^-1 A^1 - lambda^A I)| against the
/// numerically assembled quasilinear matrices.
pub fn eigen_residual(state: &FluidState, set: &ConstitutiveSet) -> f64 {
    let (a0, a1, _) = crate::solver::quasilinear_matrices(state, set);
    let m = mat3_mul(&mat3_inv(&a0), &a1);
    let eig = eigensystem(state, set);
    let mut worst = 0.0f64;
    for a in 0..3 {
        let l = eig.left[a];
        for col in 0..3 {
            let mut s = -eig.lambdas[a] * l[col];
            for row in 0..3 {
                s += l[row] * m[row][col];
            }
            worst = worst.max(s.abs());
        }
    }
    worst
}

/// Residual of the relation Riemann invariants would force:
/// (1/2) zeta / (tau0 (rho + q)) + dp/drho.
///
/// Invariants require this to vanish identically, which collapses the
/// pressure to a constant; any strictly positive value certifies
/// non-existence at that state.
pub fn necessary_condition_residual(
    set: &ConstitutiveSet,
    rho: f64,
    n: f64,
    q: f64,
) -> Result<f64, DegenerateInertia> {
    if rho + q == 0.0 {
        return Err(DegenerateInertia { rho, n, pi: q - set.pressure(rho, n) });
    }
    Ok(0.5 * set.zeta_over_tau0(rho, n) / (rho + q) + set.dp_drho(rho, n))
}

/// Maximum integrability defect for the acoustic left eigenvector: the curl
/// system for Lambda l^2 = grad alpha forces dh/dq = 0 with
/// h = (rho + q) c / u^0. Returns max |dh/dq| over the supplied states,
/// estimated by central differences in q (i.e. in Pi at fixed rho, n, u).
pub fn curl_obstruction(set: &ConstitutiveSet, states: &[FluidState]) -> f64 {
    let mut worst = 0.0f64;
    for s in states {
        let q = set.pressure(s.rho, s.n) + s.pi;
        let u0 = s.u0();
        let h_of = |qq: f64| {
            let c2 = barotropic_sound_speed_sq(set, s.rho, s.n, qq);
            (s.rho + qq) * c2.max(0.0).sqrt() / u0
        };
        let dq = 1e-5 * (1.0 + q.abs());
        let defect = (h_of(q + dq) - h_of(q - dq)) / (2.0 * dq);
        worst = worst.max(defect.abs());
    }
    worst
}

fn mat3_inv(m: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let det = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
    assert!(det != 0.0, "singular matrix");
    let inv_det = 1.0 / det;
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (a, b) = ((i + 1) % 3, (i + 2) % 3);
            let (c, d) = ((j + 1) % 3, (j + 2) % 3);
            // Transposed cofactor.
            out[j][i] = (m[a][c] * m[b][d] - m[a][d] * m[b][c]) * inv_det;
        }
    }
    out
}

fn mat3_mul(a: &[[f64; 3]; 3], b: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
    let mut out = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    out
}
