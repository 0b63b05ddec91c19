use thiserror::Error;

/// Errors raised by the solvers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("level sum not converged at cutoff M = {cutoff}: tail term {tail:e}")]
    TailNotConverged { cutoff: usize, tail: f64 },

    #[error("fixed-point iteration failed to contract (observed Lipschitz ratio {ratio:.6}) after {iterations} iterations")]
    ContractionFailure { ratio: f64, iterations: usize },

    #[error("out of regime: {0}")]
    OutOfRegime(String),

    #[error("quadrature failed for element {index}: achieved error {achieved:e}")]
    Quadrature { index: String, achieved: f64 },

    #[error("matrix dimension {dim} exceeds cap {cap}; reduce the basis cutoffs")]
    DimensionCap { dim: usize, cap: usize },

    #[error("eigensolver did not converge")]
    EigenNoConvergence,

    #[error("potential is not sign-definite: -W has eigenvalue {0:e}")]
    Indefinite(f64),

    #[error("constraint violation: {0}")]
    ConstraintViolation(String),

    #[error("singular reference: {0}")]
    SingularReference(String),

    #[error("inadmissible perturbation: {0}")]
    Inadmissible(String),

    #[error("internal inconsistency: {0}")]
    Inconsistency(String),
}

pub type Result<T> = std::result::Result<T, Error>;
