use nalgebra::Vector3;

use super::SurfacePatch;
use crate::{Error, Result};

/// Relative step for centered finite differences standing in for missing
/// third-order surface data.
pub(crate) const FD_STEP_FRACTION: f64 = 1e-6;

/// Metric coefficients, principal curvatures, and the first partials entering
/// the Codazzi-Gauss relations, sampled at one mid-surface point.
///
/// Sign convention: both curvatures are `+1` on the unit sphere with the
/// outward normal.
#[derive(Debug, Clone, Copy)]
pub struct MetricSample {
    /// `A_theta = |r_theta|`
    pub a_theta: f64,
    /// `A_z = |r_z|`
    pub a_z: f64,
    pub kappa_theta: f64,
    pub kappa_z: f64,
    /// `dA_theta/dz`
    pub a_theta_dz: f64,
    /// `dA_z/dtheta`
    pub a_z_dtheta: f64,
    /// `dkappa_theta/dz`
    pub kappa_theta_dz: f64,
    /// `dkappa_z/dtheta`
    pub kappa_z_dtheta: f64,
    /// Outward unit normal.
    pub normal: Vector3<f64>,
}

impl MetricSample {
    pub fn gaussian(&self) -> f64 {
        self.kappa_theta * self.kappa_z
    }
}

/// All four first partials of the metric coefficients and curvatures, used by
/// the chain-rule assembly of analytic field gradients.
#[derive(Debug, Clone, Copy)]
pub struct MetricGradients {
    pub a_theta: (f64, f64),
    pub a_z: (f64, f64),
    pub kappa_theta: (f64, f64),
    pub kappa_z: (f64, f64),
}

/// Bare metric data without derivative fallbacks; cheap enough for inner loops.
#[derive(Debug, Clone, Copy)]
pub(crate) struct MetricCore {
    pub a_theta: f64,
    pub a_z: f64,
    pub kappa_theta: f64,
    pub kappa_z: f64,
    pub normal: Vector3<f64>,
}

impl MetricCore {
    pub fn gaussian(&self) -> f64 {
        self.kappa_theta * self.kappa_z
    }
}

impl SurfacePatch {
    /// Metric coefficients, curvatures and normal, skipping domain checks and
    /// derivative fallbacks.  The analytic evaluators extend smoothly outside
    /// the nominal parameter box, which the finite-difference stencils rely on.
    pub(crate) fn metric_core(&self, theta: f64, z: f64) -> Result<MetricCore> {
        let rt = self.d_theta(theta, z);
        let rz = self.d_z(theta, z);
        let a_theta = rt.norm();
        let a_z = rz.norm();
        if a_theta < 1e-12 {
            return Err(Error::DegenerateTangent { axis: "theta", theta, z, len: a_theta });
        }
        if a_z < 1e-12 {
            return Err(Error::DegenerateTangent { axis: "z", theta, z, len: a_z });
        }
        let cross = rt.cross(&rz);
        let normal = self.orientation() * cross / cross.norm();
        // Second fundamental form against the outward normal, signed so the
        // unit sphere yields +1: kappa = -(n . r_aa) / A_a^2.
        let kappa_theta = -normal.dot(&self.dd_theta_theta(theta, z)) / (a_theta * a_theta);
        let kappa_z = -normal.dot(&self.dd_zz(theta, z)) / (a_z * a_z);
        Ok(MetricCore { a_theta, a_z, kappa_theta, kappa_z, normal })
    }

    /// Finite-difference steps for the two surface coordinates.
    pub(crate) fn fd_steps(&self) -> (f64, f64) {
        (FD_STEP_FRACTION * self.omega(), FD_STEP_FRACTION * self.length())
    }

    /// All first partials of `A_theta, A_z, kappa_theta, kappa_z`.
    ///
    /// Metric partials come from the supplied second derivatives; curvature
    /// partials need third-order data and fall back to centered differences of
    /// the analytic curvature evaluator.
    pub fn metric_gradients(&self, theta: f64, z: f64) -> Result<MetricGradients> {
        let rt = self.d_theta(theta, z);
        let rz = self.d_z(theta, z);
        let a_theta = rt.norm();
        let a_z = rz.norm();
        let rtt = self.dd_theta_theta(theta, z);
        let rtz = self.dd_theta_z(theta, z);
        let rzz = self.dd_zz(theta, z);
        let a_theta_grad = (rt.dot(&rtt) / a_theta, rt.dot(&rtz) / a_theta);
        let a_z_grad = (rz.dot(&rtz) / a_z, rz.dot(&rzz) / a_z);

        let (d_th, d_z) = self.fd_steps();
        let ktheta = |th: f64, zz: f64| self.metric_core(th, zz).map(|m| m.kappa_theta);
        let kz = |th: f64, zz: f64| self.metric_core(th, zz).map(|m| m.kappa_z);
        let kappa_theta = (
            (ktheta(theta + d_th, z)? - ktheta(theta - d_th, z)?) / (2.0 * d_th),
            (ktheta(theta, z + d_z)? - ktheta(theta, z - d_z)?) / (2.0 * d_z),
        );
        let kappa_z = (
            (kz(theta + d_th, z)? - kz(theta - d_th, z)?) / (2.0 * d_th),
            (kz(theta, z + d_z)? - kz(theta, z - d_z)?) / (2.0 * d_z),
        );
        Ok(MetricGradients { a_theta: a_theta_grad, a_z: a_z_grad, kappa_theta, kappa_z })
    }
}

/// Evaluates the shell metric at a point of the mid-surface.
///
/// `A_theta = |r_theta|`, `A_z = |r_z|`; the curvatures come from the second
/// fundamental form divided by the squared metric coefficient, signed so the
/// unit sphere gives `+1`.  Curvature partials use the centered-difference
/// fallback with step `1e-6` of the domain extent.
pub fn evaluate_metric(surface: &SurfacePatch, theta: f64, z: f64) -> Result<MetricSample> {
    if !surface.contains(theta, z) {
        return Err(Error::OutOfDomain { theta, z });
    }
    let core = surface.metric_core(theta, z)?;
    let grads = surface.metric_gradients(theta, z)?;
    Ok(MetricSample {
        a_theta: core.a_theta,
        a_z: core.a_z,
        kappa_theta: core.kappa_theta,
        kappa_z: core.kappa_z,
        a_theta_dz: grads.a_theta.1,
        a_z_dtheta: grads.a_z.0,
        kappa_theta_dz: grads.kappa_theta.1,
        kappa_z_dtheta: grads.kappa_z.0,
        normal: core.normal,
    })
}

/// Maximal absolute residuals of the three Codazzi-Gauss relations over a grid.
#[derive(Debug, Clone, Copy)]
pub struct CodazziResiduals {
    /// `dkappa_z/dtheta - (kappa_theta - kappa_z) A_{z,theta} / A_z`
    pub r1: f64,
    /// `dkappa_theta/dz - (kappa_z - kappa_theta) A_{theta,z} / A_theta`
    pub r2: f64,
    /// `d/dz (A_{theta,z}/A_z) + d/dtheta (A_{z,theta}/A_theta) + A_z A_theta kappa_z kappa_theta`
    pub r3: f64,
}

impl CodazziResiduals {
    pub fn max(&self) -> f64 {
        self.r1.max(self.r2).max(self.r3)
    }
}

/// Codazzi-Gauss residuals for an arbitrary metric provider.
///
/// The provider supplies `MetricSample`s at interior points; the second-order
/// derivatives needed by the Gauss relation are formed by centered differences
/// of the provider's own first partials.  Exposed so that tests can feed in a
/// deliberately inconsistent metric.
pub fn codazzi_residuals_of<F>(
    metric: F,
    theta_range: (f64, f64),
    z_range: (f64, f64),
    resolution: usize,
) -> Result<CodazziResiduals>
where
    F: Fn(f64, f64) -> Result<MetricSample>,
{
    let n = resolution;
    let (t0, t1) = theta_range;
    let (z0, z1) = z_range;
    let d_th = FD_STEP_FRACTION * (t1 - t0);
    let d_z = FD_STEP_FRACTION * (z1 - z0);
    let mut r = CodazziResiduals { r1: 0.0, r2: 0.0, r3: 0.0 };
    for i in 0..n {
        // Cell-centered grid keeps the FD stencils inside the analytic region.
        let th = t0 + (t1 - t0) * (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let z = z0 + (z1 - z0) * (j as f64 + 0.5) / n as f64;
            let m = metric(th, z)?;
            let r1 = m.kappa_z_dtheta - (m.kappa_theta - m.kappa_z) * m.a_z_dtheta / m.a_z;
            let r2 = m.kappa_theta_dz - (m.kappa_z - m.kappa_theta) * m.a_theta_dz / m.a_theta;
            let g_z = |zz: f64| -> Result<f64> {
                let s = metric(th, zz)?;
                Ok(s.a_theta_dz / s.a_z)
            };
            let g_th = |tt: f64| -> Result<f64> {
                let s = metric(tt, z)?;
                Ok(s.a_z_dtheta / s.a_theta)
            };
            let dg_z = (g_z(z + d_z)? - g_z(z - d_z)?) / (2.0 * d_z);
            let dg_th = (g_th(th + d_th)? - g_th(th - d_th)?) / (2.0 * d_th);
            let r3 = dg_z + dg_th + m.a_z * m.a_theta * m.kappa_z * m.kappa_theta;
            r.r1 = r.r1.max(r1.abs());
            r.r2 = r.r2.max(r2.abs());
            r.r3 = r.r3.max(r3.abs());
        }
    }
    Ok(r)
}

/// Codazzi-Gauss residuals of a surface patch over `resolution x resolution`
/// cell centers.  An embeddable surface satisfies the relations exactly, so
/// the residuals measure only the finite-difference fallback error.
pub fn codazzi_gauss_residual(surface: &SurfacePatch, resolution: usize) -> Result<CodazziResiduals> {
    if resolution < 8 {
        return Err(Error::InvalidParameter(format!(
            "codazzi residual grid needs resolution >= 8, got {resolution}"
        )));
    }
    // Bypass the domain check: FD stencils poke slightly outside the box.
    let metric = |th: f64, z: f64| -> Result<MetricSample> {
        let core = surface.metric_core(th, z)?;
        let grads = surface.metric_gradients(th, z)?;
        Ok(MetricSample {
            a_theta: core.a_theta,
            a_z: core.a_z,
            kappa_theta: core.kappa_theta,
            kappa_z: core.kappa_z,
            a_theta_dz: grads.a_theta.1,
            a_z_dtheta: grads.a_z.0,
            kappa_theta_dz: grads.kappa_theta.1,
            kappa_z_dtheta: grads.kappa_z.0,
            normal: core.normal,
        })
    };
    codazzi_residuals_of(metric, surface.theta_range(), surface.z_range(), resolution)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_3, PI};

    #[test]
    fn sphere_metric_matches_symbolic_values() {
        let s = SurfacePatch::sphere(FRAC_PI_2, 0.2);
        let m = evaluate_metric(&s, 0.7, FRAC_PI_3).unwrap();
        // |r_theta| = sin z, |r_z| = 1 by symbolic differentiation.
        assert_relative_eq!(m.a_z, 1.0, epsilon = 1e-14);
        assert_relative_eq!(m.a_theta, FRAC_PI_3.sin(), epsilon = 1e-14);
        assert_relative_eq!(m.a_theta, 0.866_025_403_784_438_6, epsilon = 1e-12);
    }

    #[test]
    fn sphere_curvatures_are_plus_one() {
        let s = SurfacePatch::sphere(FRAC_PI_2, 0.2);
        for (th, z) in [(0.1, 1.05), (0.9, 1.1), (1.3, 1.19)] {
            let m = evaluate_metric(&s, th, z).unwrap();
            assert!((m.kappa_theta - 1.0).abs() < 1e-12);
            assert!((m.kappa_z - 1.0).abs() < 1e-12);
        }
    }

    /// Independent first/second fundamental form oracle: all surface
    /// derivatives by central differences of the position map alone, normal
    /// from the cross product.  Fixes the catenoid curvature signs before the
    /// analytic path is trusted.
    fn fd_curvatures(s: &SurfacePatch, th: f64, z: f64) -> (f64, f64, f64, f64) {
        let d = 1e-5;
        let p = |a: f64, b: f64| s.position(a, b);
        let rt = (p(th + d, z) - p(th - d, z)) / (2.0 * d);
        let rz = (p(th, z + d) - p(th, z - d)) / (2.0 * d);
        let rtt = (p(th + d, z) - 2.0 * p(th, z) + p(th - d, z)) / (d * d);
        let rzz = (p(th, z + d) - 2.0 * p(th, z) + p(th, z - d)) / (d * d);
        let cross = rt.cross(&rz);
        let n = s.orientation() * cross / cross.norm();
        let a_t = rt.norm();
        let a_z = rz.norm();
        (a_t, a_z, -n.dot(&rtt) / (a_t * a_t), -n.dot(&rzz) / (a_z * a_z))
    }

    #[test]
    fn catenoid_metric_against_fd_oracle() {
        let s = SurfacePatch::catenoid(PI, 0.5);
        for (th, z) in [(0.4, 1.1), (1.9, 1.33), (2.8, 1.45)] {
            let (a_t, a_z, k_t, k_z) = fd_curvatures(&s, th, z);
            let m = evaluate_metric(&s, th, z).unwrap();
            assert_relative_eq!(m.a_theta, z.cosh(), epsilon = 1e-12);
            assert_relative_eq!(m.a_z, z.cosh(), epsilon = 1e-12);
            assert_relative_eq!(m.a_theta, a_t, epsilon = 1e-8);
            assert_relative_eq!(m.a_z, a_z, epsilon = 1e-8);
            assert_relative_eq!(m.kappa_theta, k_t, epsilon = 1e-5);
            assert_relative_eq!(m.kappa_z, k_z, epsilon = 1e-5);
            // Signs under the sphere convention: parallels curve with the
            // outward normal, meridians against it.
            assert!(m.kappa_theta > 0.0);
            assert!(m.kappa_z < 0.0);
            let sech2 = 1.0 / (z.cosh() * z.cosh());
            assert_relative_eq!(m.kappa_theta, sech2, epsilon = 1e-12);
            assert_relative_eq!(m.kappa_z, -sech2, epsilon = 1e-12);
            assert!(m.gaussian() < 0.0);
            assert_relative_eq!(m.gaussian(), -1.0 / z.cosh().powi(4), epsilon = 1e-12);
        }
    }

    #[test]
    fn out_of_domain_is_rejected() {
        let s = SurfacePatch::sphere(FRAC_PI_2, 0.2);
        assert!(matches!(evaluate_metric(&s, -0.5, 1.1), Err(Error::OutOfDomain { .. })));
        assert!(matches!(evaluate_metric(&s, 0.3, 2.0), Err(Error::OutOfDomain { .. })));
    }

    #[test]
    fn codazzi_residuals_small_on_shipped_surfaces() {
        for s in [SurfacePatch::sphere(FRAC_PI_2, 0.2), SurfacePatch::catenoid(PI, 0.5)] {
            let r = codazzi_gauss_residual(&s, 32).unwrap();
            assert!(r.max() <= 1e-7, "{} residuals {:?}", s.name(), r);
        }
    }

    #[test]
    fn codazzi_detects_inconsistent_metric() {
        // Perturb A_theta without recomputing the curvatures: the Gauss
        // relation r3 must blow up.
        let s = SurfacePatch::sphere(FRAC_PI_2, 0.2);
        let metric = |th: f64, z: f64| -> Result<MetricSample> {
            let core = s.metric_core(th, z)?;
            let grads = s.metric_gradients(th, z)?;
            Ok(MetricSample {
                a_theta: core.a_theta + 0.1 * th.sin(),
                a_z: core.a_z,
                kappa_theta: core.kappa_theta,
                kappa_z: core.kappa_z,
                a_theta_dz: grads.a_theta.1,
                a_z_dtheta: grads.a_z.0 + 0.0,
                kappa_theta_dz: grads.kappa_theta.1,
                kappa_z_dtheta: grads.kappa_z.0,
                normal: core.normal,
            })
        };
        let r = codazzi_residuals_of(metric, s.theta_range(), s.z_range(), 32).unwrap();
        assert!(r.r3 > 1e-2, "r3 = {}", r.r3);
    }

    #[test]
    fn validation_grid_passes_for_catalogue() {
        for s in [
            SurfacePatch::sphere(FRAC_PI_2, 0.2),
            SurfacePatch::catenoid(PI, 0.5),
            SurfacePatch::cylinder(1.0, PI, 0.3),
        ] {
            s.validate(16).unwrap();
        }
    }

    #[test]
    fn embed_sphere_offsets_radially() {
        use super::super::ShellDomain;
        use std::sync::Arc;
        let s = Arc::new(SurfacePatch::sphere(FRAC_PI_2, 0.2));
        let dom = ShellDomain::new(Arc::clone(&s), 0.05).unwrap();
        let p = dom.embed(0.025, 0.3, 1.1).unwrap();
        assert_relative_eq!(p.norm(), 1.025, epsilon = 1e-13);
        let q = dom.embed(0.0, 0.3, 1.1).unwrap();
        assert_relative_eq!((q - s.position(0.3, 1.1)).norm(), 0.0, epsilon = 1e-15);
        assert!(dom.embed(0.5, 0.3, 1.1).is_err());
    }

    #[test]
    fn embed_catenoid_matches_cross_product_oracle() {
        use super::super::ShellDomain;
        use std::sync::Arc;
        let s = Arc::new(SurfacePatch::catenoid(PI, 0.5));
        let dom = ShellDomain::new(Arc::clone(&s), 0.05).unwrap();
        let (th, z) = (1.2, 1.3);
        let p = dom.embed(0.01, th, z).unwrap();
        let cross = s.d_theta(th, z).cross(&s.d_z(th, z));
        let oracle = s.position(th, z) + 0.01 * cross / cross.norm();
        // Orientation of the stored normal matches the raw cross product here.
        assert_relative_eq!((p - oracle).norm(), 0.0, epsilon = 1e-13);
    }
}
