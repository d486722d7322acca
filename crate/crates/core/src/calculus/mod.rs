//! Displacement fields in the shell frame, the three gradient structures, and
//! weighted `L2` norms by tensor-product Gauss-Legendre quadrature.
//!
//! The inner product on the shell is `(f, g) = int A_z A_theta f g dt dtheta dz`:
//! the reference weight of the analysis, not the exact volume element.  The
//! exact element `(1 + t kappa_theta)(1 + t kappa_z) A_z A_theta` can be
//! switched on per [`crate::geometry::ShellDomain`] for sensitivity studies;
//! the difference is of order `h`.

mod field;
mod gradient;
mod norms;
mod rectangle;
mod quadrature;

pub use field::{
    cartesian_gradient_oracle, AnalyticField, Axis, BcTag, Comp, DisplacementField, Field,
    SupportBox,
};
pub use gradient::{
    full_gradient, reduced_gradient, simplified_gradient, symmetrize, GradientKind, GradientTensor,
};
pub(crate) use gradient::gradient_from_parts;
pub use norms::{korn_quotient, l2_norm_sq, Quantity};
pub(crate) use norms::metric_unchecked;
pub use quadrature::{gauss_legendre_reference, legendre_with_derivative, Axis1, QuadratureRule};
pub use rectangle::{rectangle_interpolation_check, PlaneField, RectangleBc, RectangleCheck};
