use super::SurfacePatch;
use crate::Result;

/// Sign classification of the Gaussian curvature over the sampled grid.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GaussianSign {
    Positive,
    Negative,
    Indefinite,
}

impl std::fmt::Display for GaussianSign {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GaussianSign::Positive => write!(f, "positive"),
            GaussianSign::Negative => write!(f, "negative"),
            GaussianSign::Indefinite => write!(f, "indefinite"),
        }
    }
}

/// Grid extrema of the metric coefficients, curvatures and their gradients:
/// the standing bounds every estimate's constant depends on.
///
/// `admissible` is false when any curvature vanishes (within 1e-10) somewhere
/// on the grid, i.e. when `k` would be zero.
#[derive(Debug, Clone, Copy)]
pub struct BoundsCertificate {
    /// inf of `A_theta, A_z`
    pub a: f64,
    /// sup of `A_theta, A_z`
    pub a_sup: f64,
    /// sup of `|grad A_theta|, |grad A_z|` (surface gradient)
    pub b: f64,
    /// inf of `|kappa_theta|, |kappa_z|`
    pub k: f64,
    /// sup of `|kappa_theta|, |kappa_z|`
    pub k_sup: f64,
    /// sup of `|grad kappa_theta|, |grad kappa_z|`
    pub k1: f64,
    pub gaussian_sign: GaussianSign,
    pub admissible: bool,
}

impl BoundsCertificate {
    /// Pointwise constant bounding the terms dropped between the simplified
    /// and reduced gradients: `|F - F*|_F <= C sqrt(u_theta^2 + u_z^2)`.
    pub fn dropped_term_constant(&self) -> f64 {
        (self.k_sup * self.k_sup + 2.0 * self.b * self.b / self.a.powi(4)).sqrt()
    }
}

const VANISH_TOL: f64 = 1e-10;

/// Samples the standing bounds over a `resolution x resolution` grid and
/// classifies the Gaussian sign.  Inadmissibility (a vanishing curvature) is
/// reported in the certificate, not as an error.
pub fn bounds_certificate(surface: &SurfacePatch, resolution: usize) -> Result<BoundsCertificate> {
    let n = resolution.max(2);
    let (t0, t1) = surface.theta_range();
    let (z0, z1) = surface.z_range();
    let mut a = f64::INFINITY;
    let mut a_sup: f64 = 0.0;
    let mut b: f64 = 0.0;
    let mut k = f64::INFINITY;
    let mut k_sup: f64 = 0.0;
    let mut k1: f64 = 0.0;
    let mut all_positive = true;
    let mut all_negative = true;
    let mut vanishing = false;
    for i in 0..n {
        let th = t0 + (t1 - t0) * (i as f64 + 0.5) / n as f64;
        for j in 0..n {
            let z = z0 + (z1 - z0) * (j as f64 + 0.5) / n as f64;
            let m = surface.metric_core(th, z)?;
            let g = surface.metric_gradients(th, z)?;
            a = a.min(m.a_theta.min(m.a_z));
            a_sup = a_sup.max(m.a_theta.max(m.a_z));
            let surf_grad = |d: (f64, f64)| (d.0 / m.a_theta).hypot(d.1 / m.a_z);
            b = b.max(surf_grad(g.a_theta)).max(surf_grad(g.a_z));
            k = k.min(m.kappa_theta.abs().min(m.kappa_z.abs()));
            k_sup = k_sup.max(m.kappa_theta.abs().max(m.kappa_z.abs()));
            k1 = k1.max(surf_grad(g.kappa_theta)).max(surf_grad(g.kappa_z));
            if m.kappa_theta.abs() < VANISH_TOL || m.kappa_z.abs() < VANISH_TOL {
                vanishing = true;
            }
            let product = m.gaussian();
            if product <= VANISH_TOL * VANISH_TOL {
                all_positive = false;
            }
            if product >= -VANISH_TOL * VANISH_TOL {
                all_negative = false;
            }
        }
    }
    let gaussian_sign = if all_positive {
        GaussianSign::Positive
    } else if all_negative {
        GaussianSign::Negative
    } else {
        GaussianSign::Indefinite
    };
    Ok(BoundsCertificate {
        a,
        a_sup,
        b,
        k,
        k_sup,
        k1,
        gaussian_sign,
        admissible: !vanishing && a > 0.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn sphere_certificate_is_positive_with_unit_curvature() {
        let s = SurfacePatch::sphere(FRAC_PI_2, 0.2);
        let c = bounds_certificate(&s, 32).unwrap();
        assert_eq!(c.gaussian_sign, GaussianSign::Positive);
        assert!(c.admissible);
        assert!((c.k - 1.0).abs() < 1e-10);
        assert!((c.k_sup - 1.0).abs() < 1e-10);
    }

    #[test]
    fn catenoid_certificate_is_negative() {
        let s = SurfacePatch::catenoid(PI, 0.2);
        let c = bounds_certificate(&s, 32).unwrap();
        assert_eq!(c.gaussian_sign, GaussianSign::Negative);
        assert!(c.admissible);
        assert!(c.k > 0.0 && c.k_sup < 1.0);
    }

    #[test]
    fn cylinder_is_inadmissible_and_indefinite() {
        let s = SurfacePatch::cylinder(1.0, PI, 0.3);
        let c = bounds_certificate(&s, 16).unwrap();
        assert!(!c.admissible);
        assert_eq!(c.gaussian_sign, GaussianSign::Indefinite);
    }

    #[test]
    fn certificate_stable_under_refinement() {
        for s in [SurfacePatch::sphere(FRAC_PI_2, 0.2), SurfacePatch::catenoid(PI, 0.5)] {
            let coarse = bounds_certificate(&s, 32).unwrap();
            let fine = bounds_certificate(&s, 64).unwrap();
            for (x, y) in [
                (coarse.a, fine.a),
                (coarse.a_sup, fine.a_sup),
                (coarse.k, fine.k),
                (coarse.k_sup, fine.k_sup),
            ] {
                assert!((x - y).abs() <= 0.01 * x.abs().max(y.abs()), "{} vs {}", x, y);
            }
        }
    }
}
