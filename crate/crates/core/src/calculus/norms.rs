use rayon::prelude::*;

use super::field::{Comp, Field};
use super::gradient::{eval_field_parts, gradient_from_parts, GradientKind};
use super::quadrature::QuadratureRule;
use crate::geometry::{MetricSample, ShellDomain};
use crate::{Error, Result};

/// The squared quantity integrated by [`l2_norm_sq`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// A single displacement component.
    Component(Comp),
    /// All three components, i.e. `|u|^2`.
    AllComponents,
    /// Frobenius norm of a gradient structure.
    Gradient(GradientKind),
    /// Frobenius norm of the symmetrized gradient structure.
    Strain(GradientKind),
}

pub(crate) fn metric_unchecked(
    surface: &crate::geometry::SurfacePatch,
    theta: f64,
    z: f64,
) -> Result<MetricSample> {
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

/// Weighted `L2` norm squared of a field quantity over the shell:
/// quadrature of the squared quantity against the reference weight
/// `A_z A_theta` (or the exact volume element when the domain asks for it).
///
/// Fields with a declared support box are integrated over the support
/// intersected with the domain, which is exact since they vanish outside.
/// The summation order is fixed (theta-major, then z, then t), so results are
/// bit-reproducible regardless of the worker count.
pub fn l2_norm_sq(
    quantity: Quantity,
    field: &dyn Field,
    domain: &ShellDomain,
    rule: &QuadratureRule,
) -> Result<f64> {
    rule.check_covers(domain)?;
    let rule = match field.support() {
        Some(sb) => {
            let (th0, th1) = domain.surface().theta_range();
            let (z0, z1) = domain.surface().z_range();
            let theta = (sb.theta.0.max(th0), sb.theta.1.min(th1));
            let z = (sb.z.0.max(z0), sb.z.1.min(z1));
            if theta.0 >= theta.1 || z.0 >= z.1 {
                return Ok(0.0);
            }
            rule.restricted(theta, z)
        }
        None => rule.clone(),
    };
    let surface = domain.surface();
    let exact_volume = domain.exact_volume_element;

    // One job per theta node; each job reduces its (z, t) block serially.
    let partials: Result<Vec<f64>> = rule
        .theta
        .nodes
        .par_iter()
        .zip(rule.theta.weights.par_iter())
        .map(|(&theta, &w_theta)| {
            let mut acc = 0.0;
            for (&z, &w_z) in rule.z.nodes.iter().zip(&rule.z.weights) {
                let m = metric_unchecked(surface, theta, z)?;
                let base_weight = w_theta * w_z * m.a_theta * m.a_z;
                for (&t, &w_t) in rule.t.nodes.iter().zip(&rule.t.weights) {
                    let mut weight = base_weight * w_t;
                    if exact_volume {
                        weight *= (1.0 + t * m.kappa_theta) * (1.0 + t * m.kappa_z);
                    }
                    let value = match quantity {
                        Quantity::Component(c) => {
                            let v = field.eval(c, t, theta, z);
                            v * v
                        }
                        Quantity::AllComponents => Comp::ALL
                            .iter()
                            .map(|&c| {
                                let v = field.eval(c, t, theta, z);
                                v * v
                            })
                            .sum(),
                        Quantity::Gradient(kind) => {
                            let (u, du) = eval_field_parts(field, t, theta, z);
                            gradient_from_parts(kind, &m, t, &u, &du)?.frobenius_sq()
                        }
                        Quantity::Strain(kind) => {
                            let (u, du) = eval_field_parts(field, t, theta, z);
                            gradient_from_parts(kind, &m, t, &u, &du)?.symmetrize().frobenius_sq()
                        }
                    };
                    acc += weight * value;
                }
            }
            Ok(acc)
        })
        .collect();
    Ok(partials?.iter().sum())
}

/// Korn quotient `|e(u)|^2 / |grad u|^2` for the chosen gradient structure.
pub fn korn_quotient(
    field: &dyn Field,
    domain: &ShellDomain,
    rule: &QuadratureRule,
    kind: GradientKind,
) -> Result<f64> {
    let denom = l2_norm_sq(Quantity::Gradient(kind), field, domain, rule)?;
    if denom <= 1e-28 {
        return Err(Error::ZeroGradientField);
    }
    let numer = l2_norm_sq(Quantity::Strain(kind), field, domain, rule)?;
    Ok(numer / denom)
}
