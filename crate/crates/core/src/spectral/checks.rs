use std::sync::Arc;

use nalgebra::DVector;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::assemble::{assemble, assemble_mass, component_norm_sq, form_value};
use super::basis::{build_space, build_space_constrained, Resolution};
use super::eigen::{min_eig, min_eig_pencil, EigenResult};
use crate::calculus::{Comp, GradientKind};
use crate::geometry::{bounds_certificate, GaussianSign, ShellDomain, SurfacePatch};
use crate::{Error, Result};

/// Assembly metadata reported next to an eigenvalue.
#[derive(Debug, Clone, Copy)]
pub struct KornDiagnostics {
    pub dim: usize,
    pub resolution: Resolution,
    pub quadrature_nodes: (usize, usize, usize),
}

/// End-to-end discrete Korn constant: builds the Ritz space, assembles the
/// full-gradient Gram pair, and extracts the smallest generalized eigenvalue.
///
/// The Ritz value is an upper bound for the continuum Korn constant (it is an
/// infimum over a subspace); its thickness scaling, not its absolute value,
/// is the quantity under test.
pub fn korn_constant(
    surface: &Arc<SurfacePatch>,
    h: f64,
    resolution: Resolution,
) -> Result<(EigenResult, KornDiagnostics)> {
    let cert = bounds_certificate(surface, 32)?;
    if !cert.admissible || cert.gaussian_sign == GaussianSign::Indefinite {
        return Err(Error::SignMismatch(format!(
            "korn constant needs an admissible surface with definite Gaussian sign; {} is {}",
            surface.name(),
            cert.gaussian_sign
        )));
    }
    let domain = ShellDomain::new(Arc::clone(surface), h)?;
    let space = build_space(&domain, resolution)?;
    let rule = space.assembly_rule();
    let pair = assemble(&space, &rule, GradientKind::Full)?;
    let eig = min_eig(&pair)?;
    let diag = KornDiagnostics {
        dim: space.dim(),
        resolution,
        quadrature_nodes: (rule.t.len(), rule.theta.len(), rule.z.len()),
    };
    Ok((eig, diag))
}

/// Max ratio over a seeded random sample of discrete fields, per thickness.
#[derive(Debug, Clone)]
pub struct RatioSweep {
    pub per_h: Vec<(f64, f64)>,
    pub skipped: usize,
    pub seed: u64,
}

impl RatioSweep {
    /// Largest-to-smallest ratio across thicknesses.
    pub fn drift(&self) -> f64 {
        let max = self.per_h.iter().map(|p| p.1).fold(0.0f64, f64::max);
        let min = self.per_h.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
        max / min
    }
}

fn random_coefficients(rng: &mut ChaCha8Rng, dim: usize) -> DVector<f64> {
    DVector::from_fn(dim, |_, _| rng.random_range(-1.0..1.0))
}

/// Korn-Poincare property probe: for random fields in the discrete subspace,
/// the tangential component norms (negative curvature) or the full
/// displacement norm (positive curvature, short shells) are controlled by the
/// simplified-gradient strain norm.  Reports the max ratio per thickness;
/// boundedness and small drift across `h` is the testable content.
pub fn korn_poincare_check(
    surface: &Arc<SurfacePatch>,
    hs: &[f64],
    resolution: Resolution,
    n_samples: usize,
    seed: u64,
) -> Result<RatioSweep> {
    let cert = bounds_certificate(surface, 32)?;
    let sign = cert.gaussian_sign;
    if sign == GaussianSign::Indefinite {
        return Err(Error::SignMismatch("korn-poincare check needs a definite Gaussian sign".into()));
    }
    let mut per_h = Vec::new();
    let mut skipped = 0usize;
    for &h in hs {
        let domain = ShellDomain::new(Arc::clone(surface), h)?;
        let space = build_space(&domain, resolution)?;
        let rule = space.assembly_rule();
        let strain = assemble(&space, &rule, GradientKind::Simplified)?.e;
        let mass = assemble_mass(&space, &rule)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut max_ratio: f64 = 0.0;
        for _ in 0..n_samples {
            let c = random_coefficients(&mut rng, space.dim());
            let e_sq = form_value(&strain, &c);
            let scale = form_value(&mass, &c);
            if e_sq <= 1e-20 * scale {
                skipped += 1;
                continue;
            }
            let ratio_sq = match sign {
                GaussianSign::Negative => {
                    let th = component_norm_sq(&mass, &space, Comp::Theta, &c);
                    let zz = component_norm_sq(&mass, &space, Comp::Z, &c);
                    th.max(zz) / e_sq
                }
                GaussianSign::Positive => scale / e_sq,
                GaussianSign::Indefinite => unreachable!(),
            };
            max_ratio = max_ratio.max(ratio_sq.sqrt());
        }
        per_h.push((h, max_ratio));
    }
    Ok(RatioSweep { per_h, skipped, seed })
}

/// One thickness sample of the uniform Korn-Poincare minimum.
#[derive(Debug, Clone, Copy)]
pub struct UniformKpPoint {
    pub h: f64,
    pub min_value: f64,
    pub residual: f64,
    pub dim: usize,
}

/// Discrete minimum of `|e(u)|^2 / (|u|^2 + |grad u|^2)`.
///
/// With `constrained = true` the normal component vanishes on the face
/// `t = +h/2` (tangential boundary condition `u . n = 0`), under which the
/// minimum stays bounded away from zero uniformly in `h`.  Without the
/// constraint on a negative-curvature shell it decays, which the contrast
/// run exercises.
pub fn uniform_kp_check(
    surface: &Arc<SurfacePatch>,
    hs: &[f64],
    resolution: Resolution,
    constrained: bool,
) -> Result<Vec<UniformKpPoint>> {
    let cert = bounds_certificate(surface, 32)?;
    if cert.gaussian_sign == GaussianSign::Indefinite {
        return Err(Error::SignMismatch("uniform korn-poincare needs a definite Gaussian sign".into()));
    }
    let mut out = Vec::new();
    for &h in hs {
        let domain = ShellDomain::new(Arc::clone(surface), h)?;
        let space = if constrained {
            build_space_constrained(&domain, resolution)?
        } else {
            build_space(&domain, resolution)?
        };
        let rule = space.assembly_rule();
        let pair = assemble(&space, &rule, GradientKind::Full)?;
        let mass = assemble_mass(&space, &rule)?;
        let denom = &mass + &pair.g;
        let eig = min_eig_pencil(&pair.e, &denom)?;
        out.push(UniformKpPoint {
            h,
            min_value: eig.lambda_min,
            residual: eig.residual,
            dim: space.dim(),
        });
    }
    Ok(out)
}

/// Empirical constant of the Korn second inequality
/// `|grad u|^2 <= C (|e(u)| |u_t| / h + |u_t|^2 + |e(u)|^2)`
/// over a seeded random sample: the max ratio of left to bracket, per
/// thickness.  Stability of the constant across `h` is the testable content.
pub fn korn_second_probe(
    surface: &Arc<SurfacePatch>,
    hs: &[f64],
    resolution: Resolution,
    n_samples: usize,
    seed: u64,
) -> Result<RatioSweep> {
    let cert = bounds_certificate(surface, 32)?;
    if cert.gaussian_sign == GaussianSign::Indefinite {
        return Err(Error::SignMismatch("korn second probe needs a definite Gaussian sign".into()));
    }
    let mut per_h = Vec::new();
    let mut skipped = 0usize;
    for &h in hs {
        let domain = ShellDomain::new(Arc::clone(surface), h)?;
        let space = build_space(&domain, resolution)?;
        let rule = space.assembly_rule();
        let pair = assemble(&space, &rule, GradientKind::Full)?;
        let mass = assemble_mass(&space, &rule)?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut worst: f64 = 0.0;
        for _ in 0..n_samples {
            let c = random_coefficients(&mut rng, space.dim());
            let grad_sq = form_value(&pair.g, &c);
            let e_sq = form_value(&pair.e, &c);
            let ut_sq = component_norm_sq(&mass, &space, Comp::T, &c);
            let bracket = e_sq.sqrt() * ut_sq.sqrt() / h + ut_sq + e_sq;
            if bracket <= 1e-20 * grad_sq.max(1.0) {
                skipped += 1;
                continue;
            }
            worst = worst.max(grad_sq / bracket);
        }
        per_h.push((h, worst));
    }
    Ok(RatioSweep { per_h, skipped, seed })
}
