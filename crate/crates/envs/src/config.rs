use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::{EnvError, EnvSpec, MoEnv, PreferenceBandit, Result, Snake, Tetris};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum EnvKind {
    #[default]
    Bandit,
    Snake,
    Tetris,
}

impl EnvKind {
    pub fn name(self) -> &'static str {
        match self {
            EnvKind::Bandit => "bandit",
            EnvKind::Snake => "snake",
            EnvKind::Tetris => "tetris",
        }
    }

    /// Discount used for training and evaluation returns (Snake 0.9997,
    /// Tetris 0.995; the one-step bandit is insensitive to it).
    pub fn default_gamma(self) -> f64 {
        match self {
            EnvKind::Bandit => 0.99,
            EnvKind::Snake => 0.9997,
            EnvKind::Tetris => 0.995,
        }
    }
}

impl fmt::Display for EnvKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EnvKind {
    type Err = EnvError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "bandit" => Ok(EnvKind::Bandit),
            "snake" => Ok(EnvKind::Snake),
            "tetris" => Ok(EnvKind::Tetris),
            other => Err(EnvError::Config(format!("unknown environment {other:?} (bandit, snake, tetris)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct BanditConfig {
    /// Steps per episode. One gives the classic one-shot bandit; longer
    /// episodes give the sequential variant used for preference switching.
    pub episode_steps: usize,
}

impl Default for BanditConfig {
    fn default() -> Self {
        Self { episode_steps: 1 }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct SnakeConfig {
    pub width: usize,
    pub height: usize,
    pub agents: usize,
    pub food: usize,
    /// Side of the square egocentric observation window (odd).
    pub view: usize,
    pub max_episode_steps: usize,
    pub truncation_jitter: usize,
    /// Ticks before a corpse cell disappears; 0 keeps corpses forever.
    /// Instances are never reset as a whole, so without decay dead bodies
    /// eventually cover the board.
    pub corpse_lifetime: usize,
}

impl Default for SnakeConfig {
    fn default() -> Self {
        Self {
            width: 16,
            height: 16,
            agents: 4,
            food: 8,
            view: 11,
            max_episode_steps: 512,
            truncation_jitter: 64,
            corpse_lifetime: 128,
        }
    }
}

impl SnakeConfig {
    /// 256 agents with 3000-step horizons, grid scaled to keep the desk
    /// default's cells-per-agent and food-per-agent ratios.
    pub fn full_scale() -> Self {
        Self {
            width: 128,
            height: 128,
            agents: 256,
            food: 512,
            max_episode_steps: 3000,
            truncation_jitter: 300,
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct TetrisConfig {
    pub width: usize,
    pub height: usize,
    pub max_episode_steps: usize,
    pub truncation_jitter: usize,
    /// Ticks between automatic one-row drops at the start of an episode.
    pub gravity_period: usize,
    /// Locked pieces after which the gravity period shrinks by one tick.
    pub gravity_speedup_pieces: usize,
}

impl Default for TetrisConfig {
    fn default() -> Self {
        Self {
            width: 10,
            height: 20,
            max_episode_steps: 1000,
            truncation_jitter: 0,
            gravity_period: 4,
            gravity_speedup_pieces: 200,
        }
    }
}

impl TetrisConfig {
    pub fn full_scale() -> Self {
        Self { max_episode_steps: 3000, ..Self::default() }
    }
}

/// Environment selection plus per-environment overrides.
#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct EnvConfig {
    pub kind: EnvKind,
    pub bandit: BanditConfig,
    pub snake: SnakeConfig,
    pub tetris: TetrisConfig,
}

impl EnvConfig {
    pub fn of(kind: EnvKind) -> Self {
        Self { kind, ..Self::default() }
    }

    pub fn build(&self) -> Result<Box<dyn MoEnv>> {
        Ok(match self.kind {
            EnvKind::Bandit => Box::new(PreferenceBandit::new(self.bandit.clone())?),
            EnvKind::Snake => Box::new(Snake::new(self.snake.clone())?),
            EnvKind::Tetris => Box::new(Tetris::new(self.tetris.clone())?),
        })
    }

    pub fn spec(&self) -> Result<EnvSpec> {
        Ok(self.build()?.spec().clone())
    }
}
