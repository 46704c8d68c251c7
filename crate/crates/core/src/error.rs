use thiserror::Error;

/// Errors surfaced by state-dependent numerical operations.
///
/// Precondition violations that indicate caller bugs (index out of range,
/// dimension mismatch) panic instead; these variants cover data-dependent
/// failures that a correct caller can still run into.
#[derive(Debug, Error)]
pub enum Error {
    /// The input matrix is not a valid (or tolerably-close-to-valid)
    /// Gaussian state for the requested operation.
    #[error("malformed state: {0}")]
    MalformedState(String),

    /// The input is a legitimate state but outside what the algorithm
    /// supports (e.g. quadrature cross-correlations where a blocked
    /// zero-cross-block form is required).
    #[error("unsupported state: {0}")]
    UnsupportedState(String),

    /// An iterative solver failed to converge.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// Invalid physical configuration (non-positive lengths, bad partition).
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
