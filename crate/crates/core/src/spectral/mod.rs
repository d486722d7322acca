//! Ritz discretization of the admissible subspace and the generalized
//! eigenvalue problems behind the discrete Korn constant
//! `K = min |e(u)|^2 / |grad u|^2`, plus the Korn-Poincare property probes.

mod assemble;
mod basis;
mod checks;
mod eigen;

pub use assemble::{
    assemble, assemble_mass, component_norm_sq, entry_quadrature, form_value, project,
    write_coordinate_triplets, GramPair,
};
pub use basis::{
    build_space, build_space_constrained, BasisField, BasisIndex, CombinationField, DiscreteSpace,
    Resolution,
};
pub use checks::{
    korn_constant, korn_poincare_check, korn_second_probe, uniform_kp_check, KornDiagnostics,
    RatioSweep, UniformKpPoint,
};
pub use eigen::{dense_min_eig, min_eig, min_eig_pencil, EigenResult};
