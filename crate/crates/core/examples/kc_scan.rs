//! Scratch experiment: catenoid discrete Korn constant exponent over patch
//! parameters and theta-resolution multipliers.

use std::sync::Arc;

use shell_korn::ansatz::oscillation_index;
use shell_korn::geometry::SurfacePatch;
use shell_korn::scaling::{fit_exponent, geometric_h_grid};
use shell_korn::spectral::{korn_constant, Resolution};

fn main() {
    let grid = geometric_h_grid(1e-1, 1e-2, 3);
    for (omega, l, mult) in [
        (std::f64::consts::PI, 0.5, 4usize),
        (std::f64::consts::PI, 0.5, 6),
        (std::f64::consts::PI, 0.3, 4),
        (std::f64::consts::PI, 0.2, 4),
        (std::f64::consts::PI * 1.5, 0.5, 4),
        (2.0, 0.5, 4),
    ] {
        let surface = Arc::new(SurfacePatch::catenoid(omega, l));
        let mut samples = Vec::new();
        let mut dims = Vec::new();
        for &h in &grid {
            let n = oscillation_index(h, 1.0 / 3.0) as usize;
            let res = Resolution { theta_modes: (mult * n).max(8), ..Resolution::fixed_default() };
            match korn_constant(&surface, h, res) {
                Ok((eig, diag)) => {
                    samples.push((h, eig.lambda_min));
                    dims.push(diag.dim);
                }
                Err(e) => {
                    println!("omega={omega:.2} l={l} mult={mult}: h={h:.3e} failed: {e}");
                }
            }
        }
        if samples.len() == 3 {
            let fit = fit_exponent(&samples, 0).unwrap();
            println!(
                "omega={omega:.2} l={l} mult={mult}: alpha {:.4} r2 {:.4} dims {:?} values {:?}",
                fit.exponent,
                fit.r_squared,
                dims,
                samples.iter().map(|s| s.1).collect::<Vec<_>>()
            );
        }
    }
}
