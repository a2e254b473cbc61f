use std::path::{Path, PathBuf};

use morl_envs::EnvConfig;
use morl_metrics::CorrelationMethod;
use morl_ppo::{AlgorithmVariant, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::{DemoConfig, HarnessError, Result};

/// Keys a full run configuration must set explicitly.
const REQUIRED_KEYS: [&str; 2] = ["env.kind", "run.stages"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CorrelationChoice {
    #[default]
    Spearman,
    Kendall,
}

impl CorrelationChoice {
    pub fn method(self) -> CorrelationMethod {
        match self {
            CorrelationChoice::Spearman => CorrelationMethod::Spearman,
            CorrelationChoice::Kendall => CorrelationMethod::Kendall,
        }
    }
}

/// Which returns expected utility is computed on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ReturnScale {
    #[default]
    Raw,
    Normalized,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct EvalConfig {
    /// Lattice size target; the largest lattice not exceeding it is used.
    pub weight_point_target: usize,
    pub episodes_per_point: usize,
    /// Discount for recorded returns; the checkpoint's training discount when unset.
    pub gamma: Option<f64>,
    /// Argmax actions when true, sampled actions otherwise.
    pub deterministic: bool,
    pub hv_offset: f64,
    pub significance_threshold: f64,
    pub correlation: CorrelationChoice,
    pub eu_returns: ReturnScale,
    pub workers: usize,
    pub seed: u64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            weight_point_target: 30,
            episodes_per_point: 10,
            gamma: None,
            deterministic: true,
            hv_offset: 0.1,
            significance_threshold: 0.001,
            correlation: CorrelationChoice::Spearman,
            eu_returns: ReturnScale::Raw,
            workers: 1,
            seed: 0,
        }
    }
}

impl EvalConfig {
    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(HarnessError::Config(format!("eval: {m}")));
        if self.weight_point_target == 0 {
            return fail("weight_point_target must be positive");
        }
        if self.episodes_per_point == 0 {
            return fail("episodes_per_point must be positive");
        }
        if self.workers == 0 {
            return fail("workers must be positive");
        }
        if !(self.hv_offset >= 0.0 && self.hv_offset.is_finite()) {
            return fail("hv_offset must be finite and non-negative");
        }
        if !(self.significance_threshold > 0.0 && self.significance_threshold <= 1.0) {
            return fail("significance_threshold must lie in (0, 1]");
        }
        if let Some(g) = self.gamma {
            if !(0.0..=1.0).contains(&g) {
                return fail("gamma must lie in [0, 1]");
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Stage {
    Train,
    Evaluate,
    Report,
    Scatter,
    Demo,
}

#[derive(Debug, Clone, PartialEq, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunSection {
    pub stages: Vec<Stage>,
    pub variants: Vec<AlgorithmVariant>,
    pub out: PathBuf,
    /// Checkpoints to evaluate instead of the ones trained into `out`.
    pub checkpoints: Vec<PathBuf>,
}

impl Default for RunSection {
    fn default() -> Self {
        Self {
            stages: Vec::new(),
            variants: vec![AlgorithmVariant::MoppoConditioned],
            out: PathBuf::from("runs/latest"),
            checkpoints: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Deserialize, Serialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub run: RunSection,
    pub env: EnvConfig,
    pub train: TrainConfig,
    pub eval: EvalConfig,
    pub demo: DemoConfig,
}

impl RunConfig {
    pub fn validate(&self) -> Result<()> {
        self.train.validate()?;
        self.eval.validate()?;
        self.demo.validate()?;
        self.env.spec()?;
        if self.run.variants.is_empty() && self.run.checkpoints.is_empty() {
            return Err(HarnessError::Config("run: variants must not be empty".into()));
        }
        Ok(())
    }

    /// The fully resolved configuration, defaults included.
    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| HarnessError::Config(e.to_string()))
    }
}

fn has_key(table: &toml::Table, dotted: &str) -> bool {
    let mut current = table;
    let mut parts = dotted.split('.').peekable();
    while let Some(part) = parts.next() {
        match current.get(part) {
            Some(toml::Value::Table(t)) if parts.peek().is_some() => current = t,
            Some(_) if parts.peek().is_none() => return true,
            _ => return false,
        }
    }
    false
}

/// Parses a configuration for a pipeline run. Every missing required key is
/// reported at once; unknown keys are rejected by name.
pub fn parse_config(text: &str) -> Result<RunConfig> {
    let table: toml::Table = text.parse().map_err(|e: toml::de::Error| HarnessError::Config(e.to_string()))?;
    let missing: Vec<String> = REQUIRED_KEYS.iter().filter(|k| !has_key(&table, k)).map(|k| k.to_string()).collect();
    if !missing.is_empty() {
        return Err(HarnessError::MissingKeys(missing));
    }
    let config = parse_partial_config(text)?;
    if config.run.stages.is_empty() {
        return Err(HarnessError::Config("run.stages must list at least one stage".into()));
    }
    Ok(config)
}

/// Parses configuration sections without requiring the pipeline keys, for
/// subcommands that take their remaining settings from flags.
pub fn parse_partial_config(text: &str) -> Result<RunConfig> {
    let config: RunConfig = toml::from_str(text).map_err(|e| HarnessError::Config(e.to_string()))?;
    config.validate()?;
    Ok(config)
}

pub fn load_config(path: &Path) -> Result<RunConfig> {
    parse_config(&read_text(path)?)
}

pub(crate) fn read_text(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|source| HarnessError::File { path: path.display().to_string(), source })
}
