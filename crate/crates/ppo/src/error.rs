use thiserror::Error;

#[derive(Debug, Error)]
pub enum PpoError {
    #[error(transparent)]
    Core(#[from] morl_core::CoreError),

    #[error(transparent)]
    Env(#[from] morl_envs::EnvError),

    #[error(transparent)]
    Nn(#[from] morl_nn::NnError),

    #[error("invalid training configuration: {0}")]
    Config(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite loss in epoch {epoch}, minibatch {minibatch}: {dump}")]
    NonFiniteLoss { epoch: usize, minibatch: usize, dump: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
