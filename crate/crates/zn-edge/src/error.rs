use thiserror::Error;

/// Errors raised across the library. The CLI maps them onto exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid configuration: {0}")]
    InvalidConfiguration(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("dense guard: dimension {dim} exceeds limit {limit}")]
    DenseGuard { dim: usize, limit: usize },

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("solver did not converge after {restarts} restarts: {converged} of {requested} pairs, best unconverged residual {best_residual:.3e}")]
    Convergence {
        restarts: usize,
        converged: usize,
        requested: usize,
        best_residual: f64,
    },

    #[error("degenerate block {block} leaks out of the computed subspace (unitarity deviation {deviation:.3e})")]
    Leakage { block: usize, deviation: f64 },

    #[error("insufficient levels: {0}")]
    InsufficientLevels(String),

    #[error("representation error: {0}")]
    Representation(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(String),
}

pub type Result<T> = std::result::Result<T, Error>;
