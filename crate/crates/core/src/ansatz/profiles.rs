use crate::calculus::SupportBox;
use crate::geometry::SurfacePatch;

/// Quintic smoothstep: 0 below 0, 1 above 1, `6x^5 - 15x^4 + 10x^3` between.
/// Two continuous derivatives at the junctions.
fn smoothstep(x: f64) -> (f64, f64, f64) {
    if x <= 0.0 {
        (0.0, 0.0, 0.0)
    } else if x >= 1.0 {
        (1.0, 0.0, 0.0)
    } else {
        let s = ((6.0 * x - 15.0) * x + 10.0) * x * x * x;
        let ds = ((30.0 * x - 60.0) * x + 30.0) * x * x;
        let dds = ((120.0 * x - 180.0) * x + 60.0) * x;
        (s, ds, dds)
    }
}

/// One-dimensional compactly supported window: smoothstep ramps of width
/// `ramp` at both ends of `[lo, hi]`, plateau in between.
#[derive(Debug, Clone, Copy)]
pub struct Window {
    pub lo: f64,
    pub hi: f64,
    pub ramp: f64,
}

impl Window {
    /// Window over the central `fraction` of `[a, b]`, ramps meeting at the
    /// midpoint (pure bump, no plateau).
    pub fn central(a: f64, b: f64, fraction: f64) -> Self {
        let span = b - a;
        let lo = a + 0.5 * (1.0 - fraction) * span;
        let hi = b - 0.5 * (1.0 - fraction) * span;
        Window { lo, hi, ramp: 0.5 * (hi - lo) }
    }

    /// Value with first and second derivative.
    pub fn eval(&self, x: f64) -> (f64, f64, f64) {
        if x <= self.lo || x >= self.hi {
            return (0.0, 0.0, 0.0);
        }
        let (up, dup, ddup) = smoothstep((x - self.lo) / self.ramp);
        let (dn, ddn, dddn) = smoothstep((self.hi - x) / self.ramp);
        let r = 1.0 / self.ramp;
        let v = up * dn;
        let dv = dup * r * dn - up * ddn * r;
        let ddv = ddup * r * r * dn - 2.0 * dup * ddn * r * r + up * dddn * r * r;
        (v, dv, ddv)
    }
}

/// Smooth compactly supported amplitude `phi(theta, z)`: a product of quintic
/// smoothstep windows, by default occupying the central 60% of the domain.
#[derive(Debug, Clone, Copy)]
pub struct BumpProfile {
    pub theta: Window,
    pub z: Window,
}

/// Amplitude value with its first and second partials.
#[derive(Debug, Clone, Copy, Default)]
pub struct AmplitudeJet {
    pub value: f64,
    pub d_theta: f64,
    pub d_z: f64,
    pub dd_theta_theta: f64,
    pub dd_theta_z: f64,
    pub dd_zz: f64,
}

impl BumpProfile {
    /// Default profile on the central 60% of the surface parameter box.
    pub fn central(surface: &SurfacePatch) -> Self {
        let (t0, t1) = surface.theta_range();
        let (z0, z1) = surface.z_range();
        BumpProfile { theta: Window::central(t0, t1, 0.6), z: Window::central(z0, z1, 0.6) }
    }

    /// Profile on the central 60% of an explicit box (used for the scaled
    /// argument of the positive-curvature amplitude).
    pub fn central_of_box(theta: (f64, f64), z: (f64, f64)) -> Self {
        BumpProfile { theta: Window::central(theta.0, theta.1, 0.6), z: Window::central(z.0, z.1, 0.6) }
    }

    /// Isotropic bump: the z-window is the central 60% of `[1, 1+l]` and the
    /// theta-window is centered with the same width, so both derivative
    /// scales match.  Used as the default positive-curvature amplitude, where
    /// a strongly anisotropic support delays the asymptotic strain balance.
    pub fn isotropic_central(surface: &SurfacePatch) -> Self {
        let (t0, t1) = surface.theta_range();
        let (z0, z1) = surface.z_range();
        let z_win = Window::central(z0, z1, 0.6);
        let half = (0.5 * (z_win.hi - z_win.lo)).min(0.3 * (t1 - t0));
        let mid = 0.5 * (t0 + t1);
        BumpProfile {
            theta: Window { lo: mid - half, hi: mid + half, ramp: half },
            z: z_win,
        }
    }

    pub fn support(&self) -> SupportBox {
        SupportBox { theta: (self.theta.lo, self.theta.hi), z: (self.z.lo, self.z.hi) }
    }

    pub fn contains(&self, theta: f64, z: f64) -> bool {
        theta > self.theta.lo && theta < self.theta.hi && z > self.z.lo && z < self.z.hi
    }

    pub fn eval(&self, theta: f64, z: f64) -> AmplitudeJet {
        let (a, da, dda) = self.theta.eval(theta);
        let (b, db, ddb) = self.z.eval(z);
        AmplitudeJet {
            value: a * b,
            d_theta: da * b,
            d_z: a * db,
            dd_theta_theta: dda * b,
            dd_theta_z: da * db,
            dd_zz: a * ddb,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn window_is_compactly_supported_with_smooth_ramps() {
        let w = Window::central(0.0, 1.0, 0.6);
        assert_relative_eq!(w.lo, 0.2);
        assert_relative_eq!(w.hi, 0.8);
        assert_eq!(w.eval(0.1), (0.0, 0.0, 0.0));
        assert_eq!(w.eval(0.9), (0.0, 0.0, 0.0));
        let (v, _, _) = w.eval(0.5);
        assert_relative_eq!(v, 1.0, epsilon = 1e-14);
        // Derivatives agree with finite differences inside the ramp.
        for x in [0.25, 0.35, 0.62, 0.74] {
            let d = 1e-6;
            let (v, dv, ddv) = w.eval(x);
            let (vp, dvp, _) = w.eval(x + d);
            let (vm, dvm, _) = w.eval(x - d);
            assert_relative_eq!(dv, (vp - vm) / (2.0 * d), epsilon = 1e-7, max_relative = 1e-6);
            assert_relative_eq!(ddv, (dvp - dvm) / (2.0 * d), epsilon = 1e-6, max_relative = 1e-5);
            assert!(v >= 0.0 && v <= 1.0);
        }
    }

    #[test]
    fn bump_partials_match_finite_differences() {
        let s = SurfacePatch::catenoid(std::f64::consts::PI, 0.5);
        let bump = BumpProfile::central(&s);
        let d = 1e-6;
        for (th, z) in [(1.2, 1.2), (1.7, 1.31), (2.0, 1.15)] {
            let j = bump.eval(th, z);
            let fd_th = (bump.eval(th + d, z).value - bump.eval(th - d, z).value) / (2.0 * d);
            let fd_z = (bump.eval(th, z + d).value - bump.eval(th, z - d).value) / (2.0 * d);
            assert_relative_eq!(j.d_theta, fd_th, epsilon = 1e-6, max_relative = 1e-5);
            assert_relative_eq!(j.d_z, fd_z, epsilon = 1e-6, max_relative = 1e-5);
            let fd_tz = (bump.eval(th + d, z).d_z - bump.eval(th - d, z).d_z) / (2.0 * d);
            assert_relative_eq!(j.dd_theta_z, fd_tz, epsilon = 1e-5, max_relative = 1e-4);
        }
    }
}
