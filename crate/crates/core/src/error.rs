use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoreError {
    #[error("dimension mismatch: left has {left} components, right has {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("objective vector must have at least one component")]
    EmptyVector,

    #[error("component {index} is not finite ({value})")]
    NonFinite { index: usize, value: f64 },

    #[error("weight component {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },

    #[error("weights sum to {sum}, expected 1")]
    WeightSum { sum: f64 },

    #[error("discount factor {0} outside [0, 1)")]
    InvalidDiscount(f64),

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("lattice target count must be positive")]
    ZeroTarget,

    #[error("reward sequence is empty")]
    EmptySequence,
}
