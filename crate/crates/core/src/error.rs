use thiserror::Error;

/// Errors produced by channel generation, estimators, and solvers.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is out of its documented range.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Vector/matrix shapes do not line up.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// An iterative solver blew up (step size too large for the spectrum).
    #[error("numerical divergence: {0}")]
    Divergence(String),

    /// Adaptive quadrature could not reach the requested tolerance.
    #[error("quadrature failed to converge: {0}")]
    QuadratureFailure(String),

    /// A NaN or infinity showed up where a finite value is required.
    #[error("non-finite value: {0}")]
    NonFinite(String),
}

pub type Result<T> = std::result::Result<T, Error>;
