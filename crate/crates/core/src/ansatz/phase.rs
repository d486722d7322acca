use std::sync::Arc;

use crate::geometry::{bounds_certificate, GaussianSign, SurfacePatch};
use crate::{Error, Result};

/// Scalar phase `f(theta, z)` for the oscillatory negative-curvature test
/// field, with first and second partials.
///
/// A valid phase annihilates the transport form
/// `kappa_theta f_z^2 / A_z^2 + kappa_z f_theta^2 / A_theta^2`,
/// which factors into a linear first-order equation exactly when the Gaussian
/// curvature is negative.
#[derive(Clone)]
pub struct PhaseFunction {
    theta_range: (f64, f64),
    z_range: (f64, f64),
    repr: PhaseRepr,
}

#[derive(Clone)]
enum PhaseRepr {
    Analytic(Arc<AnalyticPhase>),
    Grid(Arc<PhaseGrid>),
}

type Scalar2 = Box<dyn Fn(f64, f64) -> f64 + Send + Sync>;

pub struct AnalyticPhase {
    pub f: Scalar2,
    pub f_theta: Scalar2,
    pub f_z: Scalar2,
    pub f_theta_theta: Scalar2,
    pub f_theta_z: Scalar2,
    pub f_zz: Scalar2,
}

/// Phase values and first/second partials at a point.
#[derive(Debug, Clone, Copy, Default)]
pub struct PhaseJet {
    pub f: f64,
    pub d_theta: f64,
    pub d_z: f64,
    pub dd_theta_theta: f64,
    pub dd_theta_z: f64,
    pub dd_zz: f64,
}

impl PhaseFunction {
    pub fn analytic(theta_range: (f64, f64), z_range: (f64, f64), phase: AnalyticPhase) -> Self {
        PhaseFunction { theta_range, z_range, repr: PhaseRepr::Analytic(Arc::new(phase)) }
    }

    pub fn theta_range(&self) -> (f64, f64) {
        self.theta_range
    }

    pub fn z_range(&self) -> (f64, f64) {
        self.z_range
    }

    pub fn jet(&self, theta: f64, z: f64) -> PhaseJet {
        match &self.repr {
            PhaseRepr::Analytic(p) => PhaseJet {
                f: (p.f)(theta, z),
                d_theta: (p.f_theta)(theta, z),
                d_z: (p.f_z)(theta, z),
                dd_theta_theta: (p.f_theta_theta)(theta, z),
                dd_theta_z: (p.f_theta_z)(theta, z),
                dd_zz: (p.f_zz)(theta, z),
            },
            PhaseRepr::Grid(g) => g.jet(theta, z),
        }
    }

    pub fn eval(&self, theta: f64, z: f64) -> f64 {
        self.jet(theta, z).f
    }

    /// Maximal absolute transport residual
    /// `|kappa_theta f_z^2 / A_z^2 + kappa_z f_theta^2 / A_theta^2|`
    /// over a validation grid.
    pub fn transport_residual(&self, surface: &SurfacePatch, resolution: usize) -> Result<f64> {
        let (t0, t1) = self.theta_range;
        let (z0, z1) = self.z_range;
        let mut worst: f64 = 0.0;
        for i in 0..resolution {
            let th = t0 + (t1 - t0) * (i as f64 + 0.5) / resolution as f64;
            for j in 0..resolution {
                let z = z0 + (z1 - z0) * (j as f64 + 0.5) / resolution as f64;
                let m = surface.metric_core(th, z)?;
                let jet = self.jet(th, z);
                let residual = m.kappa_theta * jet.d_z * jet.d_z / (m.a_z * m.a_z)
                    + m.kappa_z * jet.d_theta * jet.d_theta / (m.a_theta * m.a_theta);
                worst = worst.max(residual.abs());
            }
        }
        Ok(worst)
    }

    /// Extrema of `|f_theta|` and `|f_z|` over a box (used to size quadrature
    /// rules and to verify the nonvanishing requirement on a support).
    pub fn gradient_range(&self, theta: (f64, f64), z: (f64, f64), resolution: usize) -> PhaseGradientRange {
        let mut out = PhaseGradientRange {
            min_abs_theta: f64::INFINITY,
            max_abs_theta: 0.0,
            min_abs_z: f64::INFINITY,
            max_abs_z: 0.0,
        };
        for i in 0..=resolution {
            let th = theta.0 + (theta.1 - theta.0) * i as f64 / resolution as f64;
            for j in 0..=resolution {
                let zz = z.0 + (z.1 - z.0) * j as f64 / resolution as f64;
                let jet = self.jet(th, zz);
                out.min_abs_theta = out.min_abs_theta.min(jet.d_theta.abs());
                out.max_abs_theta = out.max_abs_theta.max(jet.d_theta.abs());
                out.min_abs_z = out.min_abs_z.min(jet.d_z.abs());
                out.max_abs_z = out.max_abs_z.max(jet.d_z.abs());
            }
        }
        out
    }
}

#[derive(Debug, Clone, Copy)]
pub struct PhaseGradientRange {
    pub min_abs_theta: f64,
    pub max_abs_theta: f64,
    pub min_abs_z: f64,
    pub max_abs_z: f64,
}

/// Characteristic speed of the factored transport equation:
/// `f_z = branch (A_z / A_theta) sqrt(-kappa_z / kappa_theta) f_theta`,
/// so `f` is constant along `d theta / dz = -c` with the value below.
fn characteristic_speed(surface: &SurfacePatch, branch: f64, theta: f64, z: f64) -> Result<f64> {
    let m = surface.metric_core(theta, z)?;
    let radicand = -m.kappa_z / m.kappa_theta;
    if radicand <= 0.0 {
        return Err(Error::NoRealCharacteristics);
    }
    Ok(branch * (m.a_z / m.a_theta) * radicand.sqrt())
}

/// Solves the transport equation by the method of characteristics.
///
/// Characteristics `d theta / dz = -c(theta, z)` are integrated by the
/// classical 4th-order Runge-Kutta one-step method with step `l/256` between
/// `z = 1` and each grid level, with theta wrapped periodically when a
/// characteristic leaves the parameter strip.  `f` is constant along
/// characteristics and equals `initial_profile` on the inflow line `z = 1`;
/// partials come from centered differences on the solution grid with step
/// equal to the grid spacing.
pub fn solve_transport(
    surface: &SurfacePatch,
    branch: f64,
    initial_profile: impl Fn(f64) -> f64,
) -> Result<PhaseFunction> {
    if branch != 1.0 && branch != -1.0 {
        return Err(Error::InvalidParameter(format!("transport branch must be +-1, got {branch}")));
    }
    let cert = bounds_certificate(surface, 32)?;
    if cert.gaussian_sign != GaussianSign::Negative {
        return Err(Error::NoRealCharacteristics);
    }
    let (t0, t1) = surface.theta_range();
    let (z0, z1) = surface.z_range();
    let omega = t1 - t0;
    let n_theta = 256usize;
    let n_z = 256usize;
    let dz = (z1 - z0) / n_z as f64;
    let d_theta = omega / n_theta as f64;

    let wrap = |th: f64| -> f64 {
        // Wrap into [t0, t1) for speed evaluation only; the unwrapped value
        // feeds the initial profile so linear profiles stay continuous.
        let mut x = (th - t0) % omega;
        if x < 0.0 {
            x += omega;
        }
        t0 + x
    };
    let speed = |th: f64, z: f64| characteristic_speed(surface, branch, wrap(th), z);

    let mut values = vec![0.0; (n_theta + 1) * (n_z + 1)];
    for j in 0..=n_z {
        let z_start = z0 + j as f64 * dz;
        for i in 0..=n_theta {
            let mut th = t0 + i as f64 * d_theta;
            // Trace back to the inflow line in j steps of size dz.
            let mut z = z_start;
            for _ in 0..j {
                let k1 = -speed(th, z)?;
                let k2 = -speed(th - 0.5 * dz * k1, z - 0.5 * dz)?;
                let k3 = -speed(th - 0.5 * dz * k2, z - 0.5 * dz)?;
                let k4 = -speed(th - dz * k3, z - dz)?;
                th -= dz / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                z -= dz;
            }
            values[j * (n_theta + 1) + i] = initial_profile(th);
        }
    }
    let grid = PhaseGrid::from_values(values, n_theta, n_z, (t0, t1), (z0, z1));
    Ok(PhaseFunction { theta_range: (t0, t1), z_range: (z0, z1), repr: PhaseRepr::Grid(Arc::new(grid)) })
}

/// Tabulated phase with derivative grids, evaluated by Catmull-Rom bicubic
/// interpolation.
pub struct PhaseGrid {
    n_theta: usize,
    n_z: usize,
    theta_range: (f64, f64),
    z_range: (f64, f64),
    f: Vec<f64>,
    f_theta: Vec<f64>,
    f_z: Vec<f64>,
    f_theta_theta: Vec<f64>,
    f_theta_z: Vec<f64>,
    f_zz: Vec<f64>,
}

impl PhaseGrid {
    fn from_values(
        values: Vec<f64>,
        n_theta: usize,
        n_z: usize,
        theta_range: (f64, f64),
        z_range: (f64, f64),
    ) -> Self {
        let d_th = (theta_range.1 - theta_range.0) / n_theta as f64;
        let d_z = (z_range.1 - z_range.0) / n_z as f64;
        let cols = n_theta + 1;
        let rows = n_z + 1;
        let at = |g: &Vec<f64>, i: usize, j: usize| g[j * cols + i];

        // First partials: centered in the interior, one-sided second order at
        // the edges; step equals the grid spacing.
        let d_dim = |g: &Vec<f64>, along_theta: bool, step: f64| -> Vec<f64> {
            let mut out = vec![0.0; g.len()];
            for j in 0..rows {
                for i in 0..cols {
                    let (n, idx) = if along_theta { (n_theta, i) } else { (n_z, j) };
                    let pick = |k: usize| if along_theta { at(g, k, j) } else { at(g, i, k) };
                    let v = if idx == 0 {
                        (-3.0 * pick(0) + 4.0 * pick(1) - pick(2)) / (2.0 * step)
                    } else if idx == n {
                        (3.0 * pick(n) - 4.0 * pick(n - 1) + pick(n - 2)) / (2.0 * step)
                    } else {
                        (pick(idx + 1) - pick(idx - 1)) / (2.0 * step)
                    };
                    out[j * cols + i] = v;
                }
            }
            out
        };
        let f_theta = d_dim(&values, true, d_th);
        let f_z = d_dim(&values, false, d_z);
        let f_theta_theta = d_dim(&f_theta, true, d_th);
        let f_theta_z = d_dim(&f_theta, false, d_z);
        let f_zz = d_dim(&f_z, false, d_z);
        PhaseGrid {
            n_theta,
            n_z,
            theta_range,
            z_range,
            f: values,
            f_theta,
            f_z,
            f_theta_theta,
            f_theta_z,
            f_zz,
        }
    }

    fn jet(&self, theta: f64, z: f64) -> PhaseJet {
        PhaseJet {
            f: self.interp(&self.f, theta, z),
            d_theta: self.interp(&self.f_theta, theta, z),
            d_z: self.interp(&self.f_z, theta, z),
            dd_theta_theta: self.interp(&self.f_theta_theta, theta, z),
            dd_theta_z: self.interp(&self.f_theta_z, theta, z),
            dd_zz: self.interp(&self.f_zz, theta, z),
        }
    }

    fn interp(&self, grid: &[f64], theta: f64, z: f64) -> f64 {
        let cols = self.n_theta + 1;
        let x = ((theta - self.theta_range.0) / (self.theta_range.1 - self.theta_range.0)
            * self.n_theta as f64)
            .clamp(0.0, self.n_theta as f64);
        let y = ((z - self.z_range.0) / (self.z_range.1 - self.z_range.0) * self.n_z as f64)
            .clamp(0.0, self.n_z as f64);
        let i0 = (x.floor() as usize).min(self.n_theta - 1);
        let j0 = (y.floor() as usize).min(self.n_z - 1);
        let u = x - i0 as f64;
        let v = y - j0 as f64;
        let clamp_i = |k: isize| k.clamp(0, self.n_theta as isize) as usize;
        let clamp_j = |k: isize| k.clamp(0, self.n_z as isize) as usize;
        let mut rows = [0.0; 4];
        for (r, row) in rows.iter_mut().enumerate() {
            let j = clamp_j(j0 as isize + r as isize - 1);
            let p = |di: isize| grid[j * cols + clamp_i(i0 as isize + di)];
            *row = catmull_rom(p(-1), p(0), p(1), p(2), u);
        }
        catmull_rom(rows[0], rows[1], rows[2], rows[3], v)
    }
}

fn catmull_rom(p0: f64, p1: f64, p2: f64, p3: f64, u: f64) -> f64 {
    0.5 * (2.0 * p1
        + (-p0 + p2) * u
        + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * u * u
        + (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * u * u * u)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn catenoid_identity_profile_gives_plane_wave() {
        // A_theta = A_z and |kappa_theta| = |kappa_z| make the characteristic
        // slope exactly one, so f(theta, z) = theta + (z - 1).
        let s = SurfacePatch::catenoid(PI, 0.5);
        let phase = solve_transport(&s, 1.0, |th| th).unwrap();
        for (th, z) in [(0.3, 1.0), (1.1, 1.2), (2.2, 1.45), (2.9, 1.5)] {
            let expected = th + (z - 1.0);
            assert!(
                (phase.eval(th, z) - expected).abs() <= 1e-8,
                "f({th}, {z}) = {} vs {expected}",
                phase.eval(th, z)
            );
        }
        let jet = phase.jet(1.4, 1.23);
        assert!((jet.d_theta - 1.0).abs() < 1e-8);
        assert!((jet.d_z - 1.0).abs() < 1e-8);
        assert!(jet.dd_theta_theta.abs() < 1e-7);
    }

    #[test]
    fn residual_invariant_holds_on_validation_grid() {
        let s = SurfacePatch::catenoid(PI, 0.5);
        for scale in [1.0, 2.0] {
            let phase = solve_transport(&s, 1.0, move |th| scale * th).unwrap();
            let r = phase.transport_residual(&s, 64).unwrap();
            assert!(r <= 1e-6, "residual {r} for scale {scale}");
        }
    }

    #[test]
    fn opposite_branch_flips_the_wave_direction() {
        let s = SurfacePatch::catenoid(PI, 0.5);
        let phase = solve_transport(&s, -1.0, |th| th).unwrap();
        let jet = phase.jet(1.4, 1.23);
        assert!((jet.d_theta - 1.0).abs() < 1e-8);
        assert!((jet.d_z + 1.0).abs() < 1e-8);
    }

    #[test]
    fn positive_curvature_has_no_real_characteristics() {
        let s = SurfacePatch::sphere(std::f64::consts::FRAC_PI_2, 0.2);
        assert!(matches!(solve_transport(&s, 1.0, |th| th), Err(Error::NoRealCharacteristics)));
    }
}
