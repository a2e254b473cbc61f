use crate::rank::{kendall_tau, spearman, Correlation};
use crate::{MetricsError, Result, SolutionSet};

/// Scores how well one objective's returns follow its conditioning weight.
///
/// Implementations receive the d-th weight components and the d-th raw
/// return components across all evaluation entries, and return `None` when
/// the score is undefined for that objective.
pub trait MappingQuality {
    fn score(&self, weights: &[f64], returns: &[f64]) -> Result<Option<Correlation>>;
}

/// Spearman's rank correlation: monotone and roughly proportional mappings.
#[derive(Debug, Clone, Copy, Default)]
pub struct SpearmanQuality;

/// Kendall's tau-b: monotone mappings only.
#[derive(Debug, Clone, Copy, Default)]
pub struct KendallQuality;

impl MappingQuality for SpearmanQuality {
    fn score(&self, weights: &[f64], returns: &[f64]) -> Result<Option<Correlation>> {
        spearman(weights, returns)
    }
}

impl MappingQuality for KendallQuality {
    fn score(&self, weights: &[f64], returns: &[f64]) -> Result<Option<Correlation>> {
        kendall_tau(weights, returns)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CorrelationMethod {
    #[default]
    Spearman,
    Kendall,
}

/// Per-objective controllability and their sum over defined objectives.
#[derive(Debug, Clone, PartialEq)]
pub struct ControllabilityReport {
    pub per_objective: Vec<Option<Correlation>>,
    pub aggregate: f64,
}

impl ControllabilityReport {
    pub fn coefficients(&self) -> Vec<Option<f64>> {
        self.per_objective.iter().map(|c| c.map(|c| c.coefficient)).collect()
    }

    /// Whether objective `d` is defined and significant at `threshold`.
    pub fn significant(&self, d: usize, threshold: f64) -> bool {
        self.per_objective
            .get(d)
            .copied()
            .flatten()
            .is_some_and(|c| c.p_value < threshold)
    }
}

pub fn controllability(set: &SolutionSet, method: CorrelationMethod) -> Result<ControllabilityReport> {
    match method {
        CorrelationMethod::Spearman => controllability_with(set, &SpearmanQuality),
        CorrelationMethod::Kendall => controllability_with(set, &KendallQuality),
    }
}

/// Controllability of `set` under an arbitrary per-objective quality measure.
///
/// Uses raw returns; undefined objectives are reported as `None` and left
/// out of the aggregate.
pub fn controllability_with(set: &SolutionSet, quality: &dyn MappingQuality) -> Result<ControllabilityReport> {
    if set.len() < 3 {
        return Err(MetricsError::TooFewSamples(set.len()));
    }
    let dim = set.dim().unwrap_or(0);
    let mut per_objective = Vec::with_capacity(dim);
    for d in 0..dim {
        let w: Vec<f64> = set.entries().iter().map(|e| e.weight[d]).collect();
        let v: Vec<f64> = set.entries().iter().map(|e| e.ret[d]).collect();
        per_objective.push(quality.score(&w, &v)?);
    }
    let aggregate = per_objective.iter().flatten().map(|c| c.coefficient).sum();
    Ok(ControllabilityReport { per_objective, aggregate })
}
