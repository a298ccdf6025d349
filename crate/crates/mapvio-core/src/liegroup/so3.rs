//! SO(3): rotation matrices, exponential/logarithm and the integration
//! coefficient matrices used by the closed-form flows.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Angle threshold below which Taylor expansions of the coefficient ratios
/// replace the trigonometric closed forms.
const SMALL_ANGLE: f64 = 1e-7;

/// Orthogonality residual allowed before a matrix is rejected as a rotation.
const ROT_TOL: f64 = 1e-6;

/// A rotation matrix with validated orthogonality.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rot3(Matrix3<f64>);

impl Rot3 {
    pub fn identity() -> Self {
        Rot3(Matrix3::identity())
    }

    /// Wraps a matrix after checking `RᵀR = I` and `det R = 1` within `1e-6`.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        let residual = orthogonality_residual(&m);
        if residual > ROT_TOL {
            return Err(Error::InvalidRotation { residual });
        }
        Ok(Rot3(m))
    }

    /// Wraps a matrix that is known to be a rotation by construction.
    pub fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Rot3(m)
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Rot3(self.0.transpose())
    }

    pub fn inverse(&self) -> Self {
        self.transpose()
    }

    /// Frobenius norm of `RᵀR − I`.
    pub fn orthogonality_residual(&self) -> f64 {
        orthogonality_residual(&self.0)
    }

    /// Nearest rotation in the Frobenius sense (polar decomposition via SVD).
    /// Applied after long composition chains when the residual drifts.
    pub fn renormalize(&mut self) {
        if self.orthogonality_residual() > 1e-9 {
            let svd = self.0.svd(true, true);
            let u = svd.u.unwrap();
            let vt = svd.v_t.unwrap();
            let mut s = Matrix3::identity();
            s[(2, 2)] = (u * vt).determinant().signum();
            self.0 = u * s * vt;
        }
    }
}

impl std::ops::Mul for Rot3 {
    type Output = Rot3;
    fn mul(self, rhs: Rot3) -> Rot3 {
        Rot3(self.0 * rhs.0)
    }
}

impl std::ops::Mul<&Vector3<f64>> for &Rot3 {
    type Output = Vector3<f64>;
    fn mul(self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }
}

impl std::ops::Mul<Vector3<f64>> for Rot3 {
    type Output = Vector3<f64>;
    fn mul(self, v: Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }
}

fn orthogonality_residual(m: &Matrix3<f64>) -> f64 {
    let ortho = (m.transpose() * m - Matrix3::identity()).norm();
    let det = (m.determinant() - 1.0).abs();
    ortho.max(det)
}

/// Skew-symmetric matrix of a 3-vector.
pub fn so3_hat(w: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(0.0, -w.z, w.y, w.z, 0.0, -w.x, -w.y, w.x, 0.0)
}

/// Inverse of [`so3_hat`].
pub fn so3_vee(m: &Matrix3<f64>) -> Vector3<f64> {
    Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// Rodrigues formula, with a second-order Taylor fallback of the sin/cos
/// coefficient ratios below the small-angle threshold.
pub fn so3_exp(w: &Vector3<f64>) -> Rot3 {
    let theta = w.norm();
    let hat = so3_hat(w);
    let (a, b) = if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        (1.0 - t2 / 6.0, 0.5 - t2 / 24.0)
    } else {
        (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
    };
    Rot3(Matrix3::identity() + a * hat + b * hat * hat)
}

/// Principal logarithm, `‖result‖ ≤ π`. Near-π rotations use axis extraction
/// from the symmetric part `R + Rᵀ`.
pub fn so3_log(r: &Rot3) -> Result<Vector3<f64>> {
    let residual = r.orthogonality_residual();
    if residual > ROT_TOL {
        return Err(Error::InvalidRotation { residual });
    }
    let m = r.matrix();
    let cos_theta = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    let theta = cos_theta.acos();

    if theta < SMALL_ANGLE {
        return Ok(so3_vee(&(m - m.transpose())) * 0.5);
    }
    if (std::f64::consts::PI - theta) < 1e-5 {
        // Antisymmetric part degenerates near π; the axis is the dominant
        // column of R + Rᵀ − (trace − 1) I = 2 (1 + cosθ)... use the
        // diagonal-based extraction: axis_i² ∝ (R_ii + 1) / 2 at θ = π.
        let sym = m + m.transpose();
        let diag = Vector3::new(
            (m[(0, 0)] - cos_theta) / (1.0 - cos_theta),
            (m[(1, 1)] - cos_theta) / (1.0 - cos_theta),
            (m[(2, 2)] - cos_theta) / (1.0 - cos_theta),
        );
        let k = diag.imax();
        let mut axis = Vector3::zeros();
        axis[k] = diag[k].max(0.0).sqrt();
        for i in 0..3 {
            if i != k {
                axis[i] = sym[(i, k)] / (2.0 * (1.0 - cos_theta) * axis[k]);
            }
        }
        axis.normalize_mut();
        // Resolve the ±axis ambiguity away from exactly π using the
        // antisymmetric part.
        let anti = so3_vee(&(m - m.transpose()));
        if anti.dot(&axis) < 0.0 {
            axis = -axis;
        }
        return Ok(axis * theta);
    }
    Ok(so3_vee(&(m - m.transpose())) * (0.5 * theta / theta.sin()))
}

/// Series coefficients for `Σ (w×)ⁿ / (n + k)!` evaluated in closed form.
fn gamma_coeffs(theta: f64, order: u32) -> (f64, f64) {
    let t2 = theta * theta;
    match order {
        // Γ₁ = I + a·(w×) + b·(w×)²  with a = (1−cosθ)/θ², b = (θ−sinθ)/θ³
        1 => {
            if theta < SMALL_ANGLE {
                (0.5 - t2 / 24.0, 1.0 / 6.0 - t2 / 120.0)
            } else {
                (
                    (1.0 - theta.cos()) / t2,
                    (theta - theta.sin()) / (t2 * theta),
                )
            }
        }
        // Γ₂ = ½I + a·(w×) + b·(w×)²
        // a = (θ − sinθ)/θ³, b = (θ²/2 + cosθ − 1)/θ⁴
        2 => {
            if theta < SMALL_ANGLE {
                (1.0 / 6.0 - t2 / 120.0, 1.0 / 24.0 - t2 / 720.0)
            } else {
                (
                    (theta - theta.sin()) / (t2 * theta),
                    (0.5 * t2 + theta.cos() - 1.0) / (t2 * t2),
                )
            }
        }
        _ => unreachable!(),
    }
}

/// Left Jacobian of SO(3): `J_l(w) = Σ (w×)ⁿ / (n+1)!`.
pub fn so3_left_jacobian(w: &Vector3<f64>) -> Matrix3<f64> {
    let hat = so3_hat(w);
    let (a, b) = gamma_coeffs(w.norm(), 1);
    Matrix3::identity() + a * hat + b * hat * hat
}

/// Inverse left Jacobian.
pub fn so3_left_jacobian_inv(w: &Vector3<f64>) -> Matrix3<f64> {
    let theta = w.norm();
    let hat = so3_hat(w);
    let b = if theta < SMALL_ANGLE {
        1.0 / 12.0 + theta * theta / 720.0
    } else {
        1.0 / (theta * theta) - (1.0 + theta.cos()) / (2.0 * theta * theta.sin())
    };
    Matrix3::identity() - 0.5 * hat + b * hat * hat
}

/// Second integration coefficient matrix: `Γ₂(w) = Σ (w×)ⁿ / (n+2)!`,
/// the double time-integral of the rotation flow used by the closed-form
/// position update.
pub fn gamma2(w: &Vector3<f64>) -> Matrix3<f64> {
    let hat = so3_hat(w);
    let (a, b) = gamma_coeffs(w.norm(), 2);
    0.5 * Matrix3::identity() + a * hat + b * hat * hat
}
