use thiserror::Error;

/// Harness failure categories; the CLI maps them to exit codes
/// (config -> 2, numerical -> 3, i/o -> 2).
#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl From<odemimo::Error> for HarnessError {
    fn from(e: odemimo::Error) -> Self {
        match e {
            odemimo::Error::InvalidInput(_) | odemimo::Error::DimensionMismatch(_) => {
                HarnessError::Config(e.to_string())
            }
            odemimo::Error::Divergence(_)
            | odemimo::Error::QuadratureFailure(_)
            | odemimo::Error::NonFinite(_) => HarnessError::Numerical(e.to_string()),
        }
    }
}

impl HarnessError {
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Config(_) | HarnessError::Io(_) => 2,
            HarnessError::Numerical(_) => 3,
        }
    }
}
