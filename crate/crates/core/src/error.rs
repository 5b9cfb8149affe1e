use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:.3e})")]
    EigenNoConvergence { iterations: usize, residual: f64 },

    #[error("ground state is degenerate within tolerance: E0 = {e0}, E1 = {e1}")]
    DegenerateGroundState { e0: f64, e1: f64 },

    #[error("linear solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    LinearNoConvergence { iterations: usize, residual: f64 },

    #[error("distribution is empty")]
    EmptyDistribution,

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid partition: {0}")]
    Partition(String),

    #[error("curve fit failed: {0}")]
    FitFailed(String),

    #[error("conditional entropy never drops to half of its unfiltered value")]
    NoHalfCrossing,

    #[error("invalid schedule: {0}")]
    Schedule(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
