//! Scratch experiment: positive-curvature quotient slope and u_t/e drift over
//! sphere patch parameters.

use std::sync::Arc;

use shell_korn::ansatz::{kirchhoff_like, BumpProfile};
use shell_korn::calculus::{korn_quotient, l2_norm_sq, Comp, GradientKind, Quantity};
use shell_korn::geometry::{ShellDomain, SurfacePatch};

fn main() {
    let h_grid: Vec<f64> = (0..7).map(|k| 10f64.powf(-1.0 - k as f64 / 3.0)).collect();
    for (omega, l) in [
        (std::f64::consts::FRAC_PI_2, 0.2),
        (std::f64::consts::FRAC_PI_2, 0.35),
        (std::f64::consts::FRAC_PI_2, 0.5),
        (std::f64::consts::PI / 4.0, 0.2),
        (std::f64::consts::PI, 0.5),
        (1.0, 0.3),
    ] {
        let sphere = Arc::new(SurfacePatch::sphere(omega, l));
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        let mut ratios: Vec<f64> = Vec::new();
        for &h in &h_grid {
            let domain = ShellDomain::new(Arc::clone(&sphere), h).unwrap();
            let field = kirchhoff_like(&sphere, h, BumpProfile::central(&sphere)).unwrap();
            let rule = field.quadrature_rule(&domain);
            let q = korn_quotient(&field, &domain, &rule, GradientKind::Full).unwrap();
            let ut = l2_norm_sq(Quantity::Component(Comp::T), &field, &domain, &rule).unwrap().sqrt();
            let e = l2_norm_sq(Quantity::Strain(GradientKind::Full), &field, &domain, &rule)
                .unwrap()
                .sqrt();
            ratios.push(ut / e);
            xs.push(h.ln());
            ys.push(q.ln());
        }
        let n = 6.0;
        let xm = xs[1..].iter().sum::<f64>() / n;
        let ym = ys[1..].iter().sum::<f64>() / n;
        let sxy: f64 = xs[1..].iter().zip(&ys[1..]).map(|(x, y)| (x - xm) * (y - ym)).sum();
        let sxx: f64 = xs[1..].iter().map(|x| (x - xm) * (x - xm)).sum();
        let slope = sxy / sxx;
        let drift = ratios.iter().cloned().fold(0.0f64, f64::max)
            / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
        println!(
            "omega={omega:.3} l={l}: slope {slope:.4}, drift {drift:.2}, q1={:.3e} q7={:.3e}",
            ys[0].exp(),
            ys[6].exp()
        );
    }
}
