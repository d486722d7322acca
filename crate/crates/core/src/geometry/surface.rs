use std::fmt;
use std::sync::Arc;

use nalgebra::Vector3;

use crate::{Error, Result};

type PointFn = Arc<dyn Fn(f64, f64) -> Vector3<f64> + Send + Sync>;

/// Analytic parametrization `r(theta, z)` of a shell mid-surface, cut along
/// principal lines.
///
/// The parametrization must be principal: `r_theta . r_z = 0` everywhere, so
/// that `theta = const` and `z = const` are the lines of curvature.  First and
/// second derivative evaluators are supplied analytically by the catalogue
/// constructors.
#[derive(Clone)]
pub struct SurfacePatch {
    name: String,
    theta_range: (f64, f64),
    z_range: (f64, f64),
    periodic: bool,
    /// Sign applied to `r_theta x r_z` so the stored normal is the outward one.
    orientation: f64,
    r: PointFn,
    r_theta: PointFn,
    r_z: PointFn,
    r_theta_theta: PointFn,
    r_theta_z: PointFn,
    r_zz: PointFn,
}

impl fmt::Debug for SurfacePatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfacePatch")
            .field("name", &self.name)
            .field("theta_range", &self.theta_range)
            .field("z_range", &self.z_range)
            .field("periodic", &self.periodic)
            .finish()
    }
}

impl SurfacePatch {
    /// Patch of the unit sphere: `r = (sin z cos theta, sin z sin theta, cos z)`.
    ///
    /// `z` is the polar angle, so the patch avoids the poles for
    /// `z in [1, 1+l]` with `l < pi - 1`.  Gaussian curvature `+1`.
    pub fn sphere(omega: f64, l: f64) -> Self {
        let r: PointFn = Arc::new(|th: f64, z: f64| {
            Vector3::new(z.sin() * th.cos(), z.sin() * th.sin(), z.cos())
        });
        let r_theta: PointFn = Arc::new(|th: f64, z: f64| {
            Vector3::new(-z.sin() * th.sin(), z.sin() * th.cos(), 0.0)
        });
        let r_z: PointFn = Arc::new(|th: f64, z: f64| {
            Vector3::new(z.cos() * th.cos(), z.cos() * th.sin(), -z.sin())
        });
        let r_theta_theta: PointFn = Arc::new(|th: f64, z: f64| {
            Vector3::new(-z.sin() * th.cos(), -z.sin() * th.sin(), 0.0)
        });
        let r_theta_z: PointFn = Arc::new(|th: f64, z: f64| {
            Vector3::new(-z.cos() * th.sin(), z.cos() * th.cos(), 0.0)
        });
        let r_zz: PointFn = Arc::new(|th: f64, z: f64| {
            Vector3::new(-z.sin() * th.cos(), -z.sin() * th.sin(), -z.cos())
        });
        // r_theta x r_z = -sin(z) r, so flip to make the normal radial-outward.
        Self {
            name: "sphere".to_string(),
            theta_range: (0.0, omega),
            z_range: (1.0, 1.0 + l),
            periodic: (omega - std::f64::consts::TAU).abs() < 1e-12,
            orientation: -1.0,
            r,
            r_theta,
            r_z,
            r_theta_theta,
            r_theta_z,
            r_zz,
        }
    }

    /// Catenoid patch: `r = (cosh z cos theta, cosh z sin theta, z)`.
    ///
    /// `A_theta = A_z = cosh z`; with the normal pointing away from the axis
    /// the principal curvatures are `kappa_theta = +sech^2 z`,
    /// `kappa_z = -sech^2 z`, so the Gaussian curvature is `-sech^4 z < 0`.
    pub fn catenoid(omega: f64, l: f64) -> Self {
        let r: PointFn = Arc::new(|th: f64, z: f64| {
            Vector3::new(z.cosh() * th.cos(), z.cosh() * th.sin(), z)
        });
        let r_theta: PointFn = Arc::new(|th: f64, z: f64| {
            Vector3::new(-z.cosh() * th.sin(), z.cosh() * th.cos(), 0.0)
        });
        let r_z: PointFn = Arc::new(|th: f64, z: f64| {
            Vector3::new(z.sinh() * th.cos(), z.sinh() * th.sin(), 1.0)
        });
        let r_theta_theta: PointFn = Arc::new(|th: f64, z: f64| {
            Vector3::new(-z.cosh() * th.cos(), -z.cosh() * th.sin(), 0.0)
        });
        let r_theta_z: PointFn = Arc::new(|th: f64, z: f64| {
            Vector3::new(-z.sinh() * th.sin(), z.sinh() * th.cos(), 0.0)
        });
        let r_zz: PointFn = Arc::new(|th: f64, z: f64| {
            Vector3::new(z.cosh() * th.cos(), z.cosh() * th.sin(), 0.0)
        });
        Self {
            name: "catenoid".to_string(),
            theta_range: (0.0, omega),
            z_range: (1.0, 1.0 + l),
            periodic: (omega - std::f64::consts::TAU).abs() < 1e-12,
            orientation: 1.0,
            r,
            r_theta,
            r_z,
            r_theta_theta,
            r_theta_z,
            r_zz,
        }
    }

    /// Circular cylinder of the given radius around the z-axis.
    ///
    /// `kappa_z = 0` identically, so the bounds certificate rejects it; it is
    /// shipped as the canonical inadmissible input.
    pub fn cylinder(radius: f64, omega: f64, l: f64) -> Self {
        let rr = radius;
        let r: PointFn =
            Arc::new(move |th: f64, z: f64| Vector3::new(rr * th.cos(), rr * th.sin(), z));
        let r_theta: PointFn =
            Arc::new(move |th: f64, _z: f64| Vector3::new(-rr * th.sin(), rr * th.cos(), 0.0));
        let r_z: PointFn = Arc::new(|_th: f64, _z: f64| Vector3::new(0.0, 0.0, 1.0));
        let r_theta_theta: PointFn =
            Arc::new(move |th: f64, _z: f64| Vector3::new(-rr * th.cos(), -rr * th.sin(), 0.0));
        let zero: PointFn = Arc::new(|_th: f64, _z: f64| Vector3::zeros());
        Self {
            name: "cylinder".to_string(),
            theta_range: (0.0, omega),
            z_range: (1.0, 1.0 + l),
            periodic: (omega - std::f64::consts::TAU).abs() < 1e-12,
            orientation: 1.0,
            r,
            r_theta,
            r_z,
            r_theta_theta,
            r_theta_z: Arc::clone(&zero),
            r_zz: zero,
        }
    }

    /// Looks a surface up by name with the given parameters.
    pub fn from_name(name: &str, omega: f64, l: f64, radius: f64) -> Result<Self> {
        match name {
            "sphere" => Ok(Self::sphere(omega, l)),
            "catenoid" => Ok(Self::catenoid(omega, l)),
            "cylinder" => Ok(Self::cylinder(radius, omega, l)),
            other => Err(Error::InvalidParameter(format!("unknown surface `{other}`"))),
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn theta_range(&self) -> (f64, f64) {
        self.theta_range
    }

    pub fn z_range(&self) -> (f64, f64) {
        self.z_range
    }

    pub fn omega(&self) -> f64 {
        self.theta_range.1 - self.theta_range.0
    }

    pub fn length(&self) -> f64 {
        self.z_range.1 - self.z_range.0
    }

    pub fn periodic(&self) -> bool {
        self.periodic
    }

    pub(crate) fn orientation(&self) -> f64 {
        self.orientation
    }

    pub fn contains(&self, theta: f64, z: f64) -> bool {
        let tol = 1e-12 * (1.0 + self.omega().abs() + self.length().abs());
        theta >= self.theta_range.0 - tol
            && theta <= self.theta_range.1 + tol
            && z >= self.z_range.0 - tol
            && z <= self.z_range.1 + tol
    }

    pub fn position(&self, theta: f64, z: f64) -> Vector3<f64> {
        (self.r)(theta, z)
    }

    pub fn d_theta(&self, theta: f64, z: f64) -> Vector3<f64> {
        (self.r_theta)(theta, z)
    }

    pub fn d_z(&self, theta: f64, z: f64) -> Vector3<f64> {
        (self.r_z)(theta, z)
    }

    pub fn dd_theta_theta(&self, theta: f64, z: f64) -> Vector3<f64> {
        (self.r_theta_theta)(theta, z)
    }

    pub fn dd_theta_z(&self, theta: f64, z: f64) -> Vector3<f64> {
        (self.r_theta_z)(theta, z)
    }

    pub fn dd_zz(&self, theta: f64, z: f64) -> Vector3<f64> {
        (self.r_zz)(theta, z)
    }

    /// Outward unit normal at a mid-surface point.
    pub fn normal(&self, theta: f64, z: f64) -> Vector3<f64> {
        let cross = self.d_theta(theta, z).cross(&self.d_z(theta, z));
        self.orientation * cross / cross.norm()
    }

    /// Local orthonormal shell frame `(n, e_theta, e_z)`.
    pub fn frame(&self, theta: f64, z: f64) -> [Vector3<f64>; 3] {
        let rt = self.d_theta(theta, z);
        let rz = self.d_z(theta, z);
        [self.normal(theta, z), rt / rt.norm(), rz / rz.norm()]
    }

    /// Checks the principal-parametrization invariants on a validation grid:
    /// tangent orthogonality and nondegeneracy, and seam matching when the
    /// patch is declared periodic.  Tolerance 1e-10.
    pub fn validate(&self, resolution: usize) -> Result<()> {
        let (t0, t1) = self.theta_range;
        let (z0, z1) = self.z_range;
        let n = resolution.max(2);
        for i in 0..=n {
            let th = t0 + (t1 - t0) * i as f64 / n as f64;
            for j in 0..=n {
                let z = z0 + (z1 - z0) * j as f64 / n as f64;
                let rt = self.d_theta(th, z);
                let rz = self.d_z(th, z);
                if rt.norm() < 1e-12 {
                    return Err(Error::DegenerateTangent { axis: "theta", theta: th, z, len: rt.norm() });
                }
                if rz.norm() < 1e-12 {
                    return Err(Error::DegenerateTangent { axis: "z", theta: th, z, len: rz.norm() });
                }
                let dot = rt.dot(&rz) / (rt.norm() * rz.norm());
                if dot.abs() > 1e-10 {
                    return Err(Error::InvalidParameter(format!(
                        "parametrization is not principal: r_theta . r_z = {dot:.3e} at ({th}, {z})"
                    )));
                }
            }
        }
        if self.periodic {
            for j in 0..=n {
                let z = z0 + (z1 - z0) * j as f64 / n as f64;
                let dp = (self.position(t0, z) - self.position(t1, z)).norm();
                let dt = (self.d_theta(t0, z) - self.d_theta(t1, z)).norm();
                if dp > 1e-10 || dt > 1e-10 {
                    return Err(Error::InvalidParameter(format!(
                        "periodic seam mismatch at z={z}: |dr|={dp:.3e}, |dr_theta|={dt:.3e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// A shell of constant thickness `h` built around a mid-surface along its
/// outward normal: points `R(t, theta, z) = r(theta, z) + t n(theta, z)` with
/// `t in [-h/2, h/2]`.
#[derive(Debug, Clone)]
pub struct ShellDomain {
    surface: Arc<SurfacePatch>,
    h: f64,
    /// Integrate against the exact volume element `(1 + t k_th)(1 + t k_z) A_th A_z`
    /// instead of the reference weight `A_th A_z`.
    pub exact_volume_element: bool,
}

impl ShellDomain {
    pub fn new(surface: Arc<SurfacePatch>, h: f64) -> Result<Self> {
        if !(h > 0.0 && h < 1.0) {
            return Err(Error::InvalidParameter(format!("thickness h={h} must lie in (0, 1)")));
        }
        let dom = Self { surface, h, exact_volume_element: false };
        dom.check_no_self_intersection(16)?;
        Ok(dom)
    }

    /// Verifies `1 + t kappa > 0` for `t = +-h/2` and both curvatures over a grid.
    fn check_no_self_intersection(&self, resolution: usize) -> Result<()> {
        let (t0, t1) = self.surface.theta_range();
        let (z0, z1) = self.surface.z_range();
        for i in 0..=resolution {
            let th = t0 + (t1 - t0) * i as f64 / resolution as f64;
            for j in 0..=resolution {
                let z = z0 + (z1 - z0) * j as f64 / resolution as f64;
                let m = self.surface.metric_core(th, z)?;
                for t in [-self.h / 2.0, self.h / 2.0] {
                    for kappa in [m.kappa_theta, m.kappa_z] {
                        let v = 1.0 + t * kappa;
                        if v <= 0.0 {
                            return Err(Error::SelfIntersecting { t, value: v });
                        }
                    }
                }
            }
        }
        Ok(())
    }

    pub fn surface(&self) -> &Arc<SurfacePatch> {
        &self.surface
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn t_range(&self) -> (f64, f64) {
        (-self.h / 2.0, self.h / 2.0)
    }

    /// Extent of each coordinate axis, in `(t, theta, z)` order.
    pub fn extents(&self) -> [f64; 3] {
        [self.h, self.surface.omega(), self.surface.length()]
    }

    /// Embeds shell coordinates into 3-space: `r + t n`.
    pub fn embed(&self, t: f64, theta: f64, z: f64) -> Result<Vector3<f64>> {
        if t.abs() > self.h / 2.0 + 1e-12 {
            return Err(Error::OutOfThickness { t, h: self.h });
        }
        if !self.surface.contains(theta, z) {
            return Err(Error::OutOfDomain { theta, z });
        }
        Ok(self.surface.position(theta, z) + t * self.surface.normal(theta, z))
    }
}
