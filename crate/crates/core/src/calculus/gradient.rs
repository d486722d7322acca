use nalgebra::Matrix3;

use super::field::Field;
use crate::geometry::{MetricSample, ShellDomain, SurfacePatch};
use crate::{Error, Result};

/// Which gradient structure to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientKind {
    /// Exact gradient in the shell frame, with the `1/(1 + t kappa)` factors.
    Full,
    /// Metric factors frozen at the mid-surface (`t = 0` in the metric only).
    Simplified,
    /// Simplified gradient with the metric-coupling terms dropped.
    Reduced,
}

/// 3x3 gradient matrix in the orthonormal shell frame, rows and columns
/// ordered `(t, theta, z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradientTensor(pub Matrix3<f64>);

impl GradientTensor {
    pub fn symmetrize(&self) -> GradientTensor {
        GradientTensor(0.5 * (self.0 + self.0.transpose()))
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum()
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// `e(u) = (G + G^T) / 2`.
pub fn symmetrize(g: &GradientTensor) -> GradientTensor {
    g.symmetrize()
}

/// Gradient entries from pre-evaluated field data; shared by the pointwise
/// API and the quadrature loops.
pub(crate) fn gradient_from_parts(
    kind: GradientKind,
    m: &MetricSample,
    t: f64,
    u: &[f64; 3],
    du: &[[f64; 3]; 3],
) -> Result<GradientTensor> {
    let (jt, jz) = match kind {
        GradientKind::Full => {
            let jt = 1.0 + t * m.kappa_theta;
            let jz = 1.0 + t * m.kappa_z;
            if jt <= 0.0 || jz <= 0.0 {
                return Err(Error::SelfIntersecting { t, value: jt.min(jz) });
            }
            (jt, jz)
        }
        GradientKind::Simplified | GradientKind::Reduced => (1.0, 1.0),
    };
    let (at, az) = (m.a_theta, m.a_z);
    let (kt, kz) = (m.kappa_theta, m.kappa_z);
    let (u_t, u_th, u_z) = (u[0], u[1], u[2]);
    let d = |c: usize, a: usize| du[c][a];

    let g = match kind {
        GradientKind::Full | GradientKind::Simplified => Matrix3::new(
            d(0, 0),
            (d(0, 1) - at * kt * u_th) / (at * jt),
            (d(0, 2) - az * kz * u_z) / (az * jz),
            d(1, 0),
            (az * d(1, 1) + az * at * kt * u_t + m.a_theta_dz * u_z) / (az * at * jt),
            (at * d(1, 2) - m.a_z_dtheta * u_z) / (az * at * jz),
            d(2, 0),
            (az * d(2, 1) - m.a_theta_dz * u_th) / (az * at * jt),
            (at * d(2, 2) + az * at * kz * u_t + m.a_z_dtheta * u_th) / (az * at * jz),
        ),
        GradientKind::Reduced => Matrix3::new(
            d(0, 0),
            d(0, 1) / at,
            d(0, 2) / az,
            d(1, 0),
            (az * d(1, 1) + az * at * kt * u_t) / (az * at),
            d(1, 2) / az,
            d(2, 0),
            d(2, 1) / at,
            (at * d(2, 2) + az * at * kz * u_t) / (az * at),
        ),
    };
    Ok(GradientTensor(g))
}

pub(crate) fn eval_field_parts(
    field: &dyn Field,
    t: f64,
    theta: f64,
    z: f64,
) -> ([f64; 3], [[f64; 3]; 3]) {
    field.eval_parts(t, theta, z)
}

fn gradient_at(
    field: &dyn Field,
    surface: &SurfacePatch,
    kind: GradientKind,
    t: f64,
    theta: f64,
    z: f64,
) -> Result<GradientTensor> {
    let m = crate::geometry::evaluate_metric(surface, theta, z)?;
    let (u, du) = eval_field_parts(field, t, theta, z);
    gradient_from_parts(kind, &m, t, &u, &du)
}

/// Exact shell-frame gradient of the field at `(t, theta, z)`.
pub fn full_gradient(
    field: &dyn Field,
    domain: &ShellDomain,
    t: f64,
    theta: f64,
    z: f64,
) -> Result<GradientTensor> {
    gradient_at(field, domain.surface(), GradientKind::Full, t, theta, z)
}

/// Simplified gradient: metric factors evaluated at the mid-surface, field
/// still evaluated at `t`.
pub fn simplified_gradient(
    field: &dyn Field,
    domain: &ShellDomain,
    t: f64,
    theta: f64,
    z: f64,
) -> Result<GradientTensor> {
    gradient_at(field, domain.surface(), GradientKind::Simplified, t, theta, z)
}

/// Reduced gradient: the simplified gradient with the `A_{theta,z}`,
/// `A_{z,theta}`, and curvature-weighted `u_theta, u_z` coupling terms dropped.
pub fn reduced_gradient(
    field: &dyn Field,
    domain: &ShellDomain,
    t: f64,
    theta: f64,
    z: f64,
) -> Result<GradientTensor> {
    gradient_at(field, domain.surface(), GradientKind::Reduced, t, theta, z)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symmetrize_kills_antisymmetric_part() {
        let g = GradientTensor(Matrix3::new(0.0, 1.0, 0.0, -1.0, 0.0, 2.0, 0.0, -2.0, 0.0));
        assert_eq!(g.symmetrize().max_abs(), 0.0);
    }

    #[test]
    fn symmetrize_fixes_symmetric_input() {
        let s = Matrix3::new(1.0, 2.0, 3.0, 2.0, 4.0, 5.0, 3.0, 5.0, 6.0);
        let g = GradientTensor(s);
        assert_eq!(g.symmetrize().0, s);
        // Idempotent.
        assert_eq!(g.symmetrize().symmetrize().0, s);
    }

    #[test]
    fn symmetrize_halves_single_offdiagonal() {
        let g = GradientTensor(Matrix3::new(0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0));
        let e = g.symmetrize().0;
        assert_eq!(e[(0, 1)], 0.5);
        assert_eq!(e[(1, 0)], 0.5);
        assert_eq!(e[(0, 0)], 0.0);
    }
}
