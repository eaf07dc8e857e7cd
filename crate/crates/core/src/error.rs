use thiserror::Error;

/// Errors raised by the geometry kernels.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// The LP margin fell inside the band where the critical/regular
    /// decision cannot be trusted.
    #[error("ambiguous classification: LP margin {margin:e} lies within the ambiguity band")]
    AmbiguousClassification { margin: f64 },

    #[error("direction set is not critical")]
    NotCritical,

    #[error("internal inconsistency: {0}")]
    InternalInconsistency(String),

    #[error("unsupported configuration: {0}")]
    UnsupportedConfiguration(String),

    /// The point lies on one of the two factor spheres of a join.
    #[error("singular point: {0}")]
    SingularPoint(String),

    #[error("hypothesis violated: {0}")]
    HypothesisViolation(String),

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    /// No Jacobi field meets the boundary data because the endpoint is conjugate.
    #[error("no solution: {0}")]
    NoSolution(String),

    #[error("linear program infeasible")]
    Infeasible,

    #[error("linear program unbounded")]
    Unbounded,
}

pub type Result<T> = std::result::Result<T, GeometryError>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(GeometryError::InvalidArgument(msg.into()))
}
