use thiserror::Error;

/// Errors surfaced by the shell-korn numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("point (theta={theta}, z={z}) lies outside the surface domain")]
    OutOfDomain { theta: f64, z: f64 },

    #[error("coordinate t={t} lies outside [-h/2, h/2] with h={h}")]
    OutOfThickness { t: f64, h: f64 },

    #[error("degenerate tangent vector at (theta={theta}, z={z}): |r_{axis}| = {len:.3e}")]
    DegenerateTangent { axis: &'static str, theta: f64, z: f64, len: f64 },

    #[error("shell self-intersects: 1 + t*kappa = {value:.3e} <= 0 at t={t}")]
    SelfIntersecting { t: f64, value: f64 },

    #[error("surface has no real characteristics: Gaussian curvature is not negative")]
    NoRealCharacteristics,

    #[error("phase gradient f_{axis} vanishes on the amplitude support (min |f_{axis}| = {min:.3e})")]
    VanishingPhaseGradient { axis: &'static str, min: f64 },

    #[error("amplitude support [{lo:.3}, {hi:.3}] leaves the theta range after scaling")]
    SupportViolation { lo: f64, hi: f64 },

    #[error("field has zero gradient norm; Korn quotient undefined")]
    ZeroGradientField,

    #[error("boundary condition violated: {0}")]
    BoundaryCondition(String),

    #[error("quadrature rule does not cover the requested domain: {0}")]
    RuleMismatch(String),

    #[error("quadrature rule under-resolves the basis: sampled entry drift {drift:.3e} under 2x refinement")]
    UnderResolvedRule { drift: f64 },

    #[error("basis is numerically dependent: L2 Gram condition number {cond:.3e} with {dim} fields")]
    IllConditionedBasis { cond: f64, dim: usize },

    #[error("gradient Gram matrix is numerically singular; increase quadrature or reduce basis")]
    SingularGram,

    #[error("eigenvalue iteration did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("surface sign does not match the requested quantity: {0}")]
    SignMismatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("config error at line {line}: {message}")]
    Config { line: usize, message: String },

    #[error("sweep failed: {failed} of {total} points failed")]
    SweepFailed { failed: usize, total: usize },

    #[error("too few samples for a fit: need at least 3, got {0}")]
    TooFewSamples(usize),

    #[error("nonpositive value in log-log fit: {0:.3e}")]
    NonPositiveValue(f64),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
