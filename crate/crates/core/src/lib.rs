//! Numerical laboratory for Korn constants of thin shells.
//!
//! The crate studies how the optimal constant in Korn's first inequality
//! scales with the thickness `h` of a shell built around a mid-surface with
//! uniformly positive or negative Gaussian curvature.  It provides
//!
//! * analytic mid-surface patches with principal-line parametrizations and
//!   the metric/curvature calculus on them ([`geometry`]),
//! * displacement fields in the shell frame, the full / simplified / reduced
//!   gradient structures, and weighted `L2` norms by tensor-product
//!   Gauss-Legendre quadrature ([`calculus`]),
//! * the two sharp test displacements: an oscillatory field phased by a
//!   transport equation for negative curvature, and a Kirchhoff-like bending
//!   field for positive curvature ([`ansatz`]),
//! * a Ritz discretization of the admissible subspace and generalized
//!   eigenvalue solves for the discrete Korn constant ([`spectral`]),
//! * thickness sweeps with log-log power-law fits ([`scaling`]), and
//! * a reproducible command-line front end ([`cli`]).
//!
//! The headline facts verified at desk scale: the Korn constant of the shell
//! decays like `h` when the Gaussian curvature is positive and like `h^(4/3)`
//! when it is negative.

pub mod ansatz;
pub mod calculus;
pub mod cli;
mod error;
pub mod geometry;
pub mod scaling;
pub mod spectral;

pub use error::{Error, Result};
