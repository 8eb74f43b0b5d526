//! Error type shared by every numerical operation in the crate.

use thiserror::Error;

/// Failures raised by model construction, solvers and checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SptError {
    #[error("invalid grid: {0}")]
    BadGrid(String),

    #[error("reference form is not positive (margin {margin:.3e})")]
    NonPositiveReference { margin: f64 },

    #[error("function is not plurisubharmonic (margin {margin:.3e})")]
    NotPlurisubharmonic { margin: f64 },

    #[error("endpoint {which} is not plurisubharmonic (margin {margin:.3e})")]
    EndpointNotPlurisubharmonic { which: usize, margin: f64 },

    #[error("deformation degenerates: 1 + eta(rho) = {value:.3e}")]
    DegenerateDeformation { value: f64 },

    #[error("function is not invariant under the torus action (defect {defect:.3e})")]
    NotBasic { defect: f64 },

    #[error("exponent {k} outside 0..={n}")]
    BadExponent { k: usize, n: usize },

    #[error("order u <= v <= 0 violated by {excess:.3e}")]
    OrderViolated { excess: f64 },

    #[error("sign condition violated: max value {max:.3e} > 0")]
    SignViolated { max: f64 },

    #[error("invalid capacity candidate {index}: {reason}")]
    InvalidCandidate { index: usize, reason: String },

    #[error("degenerate density on a set of mass {mass:.3e}")]
    DegenerateDensity { mass: f64 },

    #[error("degenerate metric (min density {min:.3e})")]
    DegenerateMetric { min: f64 },

    #[error("Newton iteration diverged at stage {stage}: residual {residual:.3e}")]
    NewtonDiverged { stage: String, residual: f64 },

    #[error("obstacle violated by {excess:.3e}")]
    ObstacleViolated { excess: f64 },

    #[error("iteration limit {iters} reached (last change {change:.3e})")]
    IterationLimit { iters: usize, change: f64 },

    #[error("Poisson right-hand side has mean {mean:.3e}")]
    PoissonNotSolvable { mean: f64 },

    #[error("Gram matrix is singular (condition {cond:.3e})")]
    SingularGram { cond: f64 },

    #[error("grids belong to different models")]
    ModelMismatch,

    #[error("operation unsupported on this model: {0}")]
    Unsupported(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o failure: {0}")]
    Io(String),

    #[error("malformed grid file: {0}")]
    Format(String),
}

impl From<std::io::Error> for SptError {
    fn from(e: std::io::Error) -> Self {
        SptError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, SptError>;
