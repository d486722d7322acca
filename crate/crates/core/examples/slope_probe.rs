//! Scratch experiment: Korn-quotient slopes of both test fields over the
//! default thickness sweep, for a few transport initial-profile scales.

use std::sync::Arc;

use shell_korn::ansatz::{kirchhoff_like, solve_transport, tovstik_smirnov, BumpProfile};
use shell_korn::calculus::{korn_quotient, GradientKind, Quantity};
use shell_korn::geometry::{ShellDomain, SurfacePatch};

fn h_grid() -> Vec<f64> {
    (0..7).map(|k| 10f64.powf(-1.0 - k as f64 / 3.0)).collect()
}

fn ols(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let xm = xs.iter().sum::<f64>() / n;
    let ym = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - xm) * (y - ym)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - xm) * (x - xm)).sum();
    let slope = sxy / sxx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let p = ym + slope * (x - xm);
            (y - p) * (y - p)
        })
        .sum();
    let ss_tot: f64 = ys.iter().map(|y| (y - ym) * (y - ym)).sum();
    (slope, 1.0 - ss_res / ss_tot)
}

fn main() {
    let omega = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(std::f64::consts::PI);
    let surface = Arc::new(SurfacePatch::catenoid(omega, 0.5));
    for scale in [1.0, 1.5, 2.0, 3.0] {
        let phase = Arc::new(solve_transport(&surface, 1.0, |th| scale * th).unwrap());
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        print!("catenoid scale={scale}: q =");
        for h in h_grid() {
            let domain = ShellDomain::new(Arc::clone(&surface), h).unwrap();
            let field =
                tovstik_smirnov(&surface, h, BumpProfile::central(&surface), &phase).unwrap();
            let rule = field.quadrature_rule(&domain);
            let q = korn_quotient(&field, &domain, &rule, GradientKind::Full).unwrap();
            print!(" {q:.4e}");
            xs.push(h.ln());
            ys.push(q.ln());
        }
        let (slope, r2) = ols(&xs[1..], &ys[1..]);
        println!("\n  -> slope {slope:.4}, R^2 {r2:.6}");
    }

    let sphere = Arc::new(SurfacePatch::sphere(std::f64::consts::FRAC_PI_2, 0.2));
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut ratios = Vec::new();
    print!("sphere kirchhoff: q =");
    for h in h_grid() {
        let domain = ShellDomain::new(Arc::clone(&sphere), h).unwrap();
        let field = kirchhoff_like(&sphere, h, BumpProfile::isotropic_central(&sphere)).unwrap();
        let rule = field.quadrature_rule(&domain);
        let q = korn_quotient(&field, &domain, &rule, GradientKind::Full).unwrap();
        let ut = shell_korn::calculus::l2_norm_sq(
            Quantity::Component(shell_korn::calculus::Comp::T),
            &field,
            &domain,
            &rule,
        )
        .unwrap()
        .sqrt();
        let e = shell_korn::calculus::l2_norm_sq(
            Quantity::Strain(GradientKind::Full),
            &field,
            &domain,
            &rule,
        )
        .unwrap()
        .sqrt();
        ratios.push(ut / e);
        print!(" {q:.4e}");
        xs.push(h.ln());
        ys.push(q.ln());
    }
    let (slope, r2) = ols(&xs[1..], &ys[1..]);
    println!("\n  -> slope {slope:.4}, R^2 {r2:.6}");
    println!("  u_t/e ratios: {ratios:.4?}");
}
