//! Mid-surfaces, metric coefficients, principal curvatures, and the standing
//! admissibility bounds.
//!
//! Coordinates follow the shell convention: `theta` runs along the
//! circumferential principal line on `[0, omega]`, `z` along the longitudinal
//! one on `[1, 1+l]`, and `t` is the normal offset.  The curvature sign is
//! fixed so that the unit sphere has `kappa_theta = kappa_z = +1` with the
//! outward normal.

mod certificate;
mod metric;
mod surface;

pub use certificate::{bounds_certificate, BoundsCertificate, GaussianSign};
pub use metric::{
    codazzi_gauss_residual, codazzi_residuals_of, evaluate_metric, CodazziResiduals, MetricGradients,
    MetricSample,
};
pub use surface::{ShellDomain, SurfacePatch};
