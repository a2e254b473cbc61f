use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] morl_core::CoreError),

    #[error(transparent)]
    Env(#[from] morl_envs::EnvError),

    #[error(transparent)]
    Metrics(#[from] morl_metrics::MetricsError),

    #[error(transparent)]
    Nn(#[from] morl_nn::NnError),

    #[error(transparent)]
    Ppo(#[from] morl_ppo::PpoError),

    #[error("checkpoint does not fit the environment: {0}")]
    Mismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("missing required config keys: {}", .0.join(", "))]
    MissingKeys(Vec<String>),

    #[error("schedule switch at step {step} lies beyond the horizon of {horizon} steps")]
    ScheduleBeyondHorizon { step: usize, horizon: usize },

    #[error("malformed report CSV at line {line}: {message}")]
    ReportCsv { line: usize, message: String },

    #[error("{path}: {source}")]
    File { path: String, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
