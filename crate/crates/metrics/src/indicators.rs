use morl_core::{scalarize, ObjectiveVector, WeightVector};

use crate::error::check_dims;
use crate::{MetricsError, ParetoFront, Result, SolutionSet};

/// Mean squared gap between consecutive per-objective sorted front values,
/// divided by `|front| - 1`. A single point has no spread and scores 0.
pub fn sparsity(front: &ParetoFront) -> Result<f64> {
    let n = front.len();
    if n == 0 {
        return Err(MetricsError::Empty("front"));
    }
    if n == 1 {
        return Ok(0.0);
    }
    let dim = front.dim().unwrap_or(0);
    let mut total = 0.0;
    for d in 0..dim {
        let mut column: Vec<f64> = front.points().iter().map(|p| p[d]).collect();
        column.sort_by(f64::total_cmp);
        total += column.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>();
    }
    Ok(total / (n - 1) as f64)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UtilityStats {
    pub mean: f64,
    /// Population standard deviation of the per-weight best utility.
    pub std: f64,
}

fn best_utilities(solutions: &[ObjectiveVector], weights: &[WeightVector]) -> Result<Vec<f64>> {
    if solutions.is_empty() {
        return Err(MetricsError::Empty("solutions"));
    }
    if weights.is_empty() {
        return Err(MetricsError::Empty("weights"));
    }
    let dim = solutions[0].dim();
    for s in solutions {
        check_dims(dim, s.dim())?;
    }
    weights
        .iter()
        .map(|w| {
            check_dims(dim, w.dim())?;
            let mut best = f64::NEG_INFINITY;
            for s in solutions {
                best = best.max(scalarize(s, w)?);
            }
            Ok(best)
        })
        .collect()
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n;
    (mean, var.sqrt())
}

/// Mean over `weights` of the best linear utility any solution attains.
///
/// The weight list stands in for the uniform distribution over the simplex.
pub fn expected_utility(solutions: &[ObjectiveVector], weights: &[WeightVector]) -> Result<f64> {
    Ok(expected_utility_stats(solutions, weights)?.mean)
}

pub fn expected_utility_stats(solutions: &[ObjectiveVector], weights: &[WeightVector]) -> Result<UtilityStats> {
    let best = best_utilities(solutions, weights)?;
    let (mean, std) = mean_std(&best);
    Ok(UtilityStats { mean, std })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CosineStats {
    pub mean: f64,
    /// Population standard deviation over evaluated pairs.
    pub std: f64,
    pub evaluated: usize,
    /// Pairs whose return (or weight) had zero norm.
    pub skipped: usize,
}

/// Cosine similarity between each conditioning weight and its return.
///
/// Callers pass already-normalized returns. Returns `Ok(None)` when every
/// pair is skipped.
pub fn cosine_alignment(pairs: &SolutionSet) -> Result<Option<CosineStats>> {
    if pairs.is_empty() {
        return Err(MetricsError::Empty("solution set"));
    }
    let mut sims = Vec::with_capacity(pairs.len());
    let mut skipped = 0;
    for e in pairs.entries() {
        let w_norm = e.weight.iter().map(|x| x * x).sum::<f64>().sqrt();
        let v_norm = e.ret.norm();
        if w_norm == 0.0 || v_norm == 0.0 {
            skipped += 1;
            continue;
        }
        let dot: f64 = e.weight.iter().zip(e.ret.iter()).map(|(a, b)| a * b).sum();
        sims.push(dot / (w_norm * v_norm));
    }
    if sims.is_empty() {
        return Ok(None);
    }
    let (mean, std) = mean_std(&sims);
    Ok(Some(CosineStats { mean, std, evaluated: sims.len(), skipped }))
}
