use thiserror::Error;

#[derive(Debug, Error)]
pub enum NnError {
    #[error("invalid network configuration: {0}")]
    Config(String),

    #[error("expected {expected} values, got {got}")]
    Length { expected: usize, got: usize },

    #[error("network is conditioned on weights but none were given")]
    MissingWeights,

    #[error("network is not conditioned on weights but weights were given")]
    UnexpectedWeights,

    #[error("action {action} out of range for {count} actions")]
    InvalidAction { action: usize, count: usize },

    #[error("backward called before any forward pass was recorded")]
    NoForward,

    #[error("loss must be a 1x1 node, got {rows}x{cols}")]
    NonScalarLoss { rows: usize, cols: usize },

    #[error("variable {0} does not belong to this tape")]
    ForeignVar(usize),

    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape { op: &'static str, left: (usize, usize), right: (usize, usize) },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
