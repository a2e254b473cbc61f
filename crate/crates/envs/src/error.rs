use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EnvError {
    #[error("agent {agent}: action {action} out of range (action count {count})")]
    InvalidAction { agent: usize, action: usize, count: usize },

    #[error("expected {expected} actions, got {got}")]
    ActionCount { expected: usize, got: usize },

    #[error("agent {0} stepped after its episode ended; reset it first")]
    EpisodeOver(usize),

    #[error("environment stepped before reset")]
    NotReset,

    #[error("agent index {agent} out of range ({count} agents)")]
    NoSuchAgent { agent: usize, count: usize },

    #[error("agent {0} is still running and cannot be reset individually")]
    AgentRunning(usize),

    #[error("invalid environment configuration: {0}")]
    Config(String),
}
