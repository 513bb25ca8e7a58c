use thiserror::Error;

/// Errors raised by MEB construction and maintenance.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MebError {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("frank-wolfe did not converge after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },

    #[error("exact solver supports dimension <= {max}, got {dim}")]
    UnsupportedDimension { dim: usize, max: usize },

    #[error("degenerate kernel: {0}")]
    DegenerateKernel(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("no coreset available yet (warm-up)")]
    WarmUp,
}

pub type Result<T> = std::result::Result<T, MebError>;

pub(crate) fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(MebError::DimensionMismatch { expected, found })
    }
}

pub(crate) fn check_unit_interval(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value < 1.0 {
        Ok(())
    } else {
        Err(MebError::InvalidInput(format!("{name} must lie in (0, 1), got {value}")))
    }
}
