use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: expected {expected}, got {got}")]
    Shape { expected: usize, got: usize },
    #[error("invalid parameter: {0}")]
    Param(String),
    #[error("invalid config: {0}")]
    Config(String),
    #[error("unsupported collision operator: {0}")]
    Unsupported(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("Picard iteration did not converge in {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
    #[error("boundary error: {0}")]
    Boundary(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for errors caused by bad user input rather than a failed solve.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Param(_) | Error::Json(_) | Error::Unsupported(_) | Error::Domain(_))
    }
}
