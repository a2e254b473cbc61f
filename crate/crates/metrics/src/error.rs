use morl_core::CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("{0} must not be empty")]
    Empty(&'static str),

    #[error("sequences have different lengths ({left} vs {right})")]
    LengthMismatch { left: usize, right: usize },

    #[error("rank correlation needs at least 3 samples, got {0}")]
    TooFewSamples(usize),

    #[error("value {value} at position {index} is not finite")]
    NonFinite { index: usize, value: f64 },

    #[error("points are not mutually non-dominated: {0} dominates {1}")]
    NotAFront(usize, usize),

    #[error("solution csv line {line}: {message}")]
    Csv { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub(crate) fn check_dims(left: usize, right: usize) -> crate::Result<()> {
    if left != right {
        return Err(MetricsError::DimensionMismatch { left, right });
    }
    Ok(())
}
