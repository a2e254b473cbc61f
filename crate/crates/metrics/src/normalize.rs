use morl_core::ObjectiveVector;

use crate::error::check_dims;
use crate::{MetricsError, Result, SolutionSet};

/// Per-objective (min, max) bounds.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizationRange {
    bounds: Vec<(f64, f64)>,
}

impl NormalizationRange {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(MetricsError::Empty("normalization range"));
        }
        for (index, &(lo, hi)) in bounds.iter().enumerate() {
            if !(lo.is_finite() && hi.is_finite()) || lo > hi {
                return Err(MetricsError::NonFinite { index, value: hi - lo });
            }
        }
        Ok(Self { bounds })
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }
}

/// Per-objective extrema over the union of every set's returns.
pub fn minmax_range(sets: &[SolutionSet]) -> Result<NormalizationRange> {
    let mut bounds: Option<Vec<(f64, f64)>> = None;
    for set in sets {
        for e in set.entries() {
            let b = bounds.get_or_insert_with(|| vec![(f64::INFINITY, f64::NEG_INFINITY); e.ret.dim()]);
            check_dims(b.len(), e.ret.dim())?;
            for (slot, &v) in b.iter_mut().zip(e.ret.iter()) {
                slot.0 = slot.0.min(v);
                slot.1 = slot.1.max(v);
            }
        }
    }
    NormalizationRange::new(bounds.ok_or(MetricsError::Empty("solution sets"))?)
}

/// Maps each objective affinely onto [0, 1]; constant objectives map to 0.
pub fn normalize(v: &ObjectiveVector, range: &NormalizationRange) -> Result<ObjectiveVector> {
    check_dims(v.dim(), range.dim())?;
    let out = v
        .iter()
        .zip(range.bounds())
        .map(|(&x, &(lo, hi))| if hi > lo { (x - lo) / (hi - lo) } else { 0.0 })
        .collect();
    Ok(ObjectiveVector::new(out)?)
}

/// Inverse of [`normalize`] for objectives with a non-degenerate range.
pub fn denormalize(v: &ObjectiveVector, range: &NormalizationRange) -> Result<ObjectiveVector> {
    check_dims(v.dim(), range.dim())?;
    let out = v
        .iter()
        .zip(range.bounds())
        .map(|(&x, &(lo, hi))| lo + x * (hi - lo))
        .collect();
    Ok(ObjectiveVector::new(out)?)
}

pub fn normalize_set(set: &SolutionSet, range: &NormalizationRange) -> Result<SolutionSet> {
    set.map_returns(|v| normalize(v, range))
}

/// Nadir (per-objective minimum over all returns) shifted down by `offset`.
pub fn nadir_reference(sets: &[SolutionSet], offset: f64) -> Result<ObjectiveVector> {
    let range = minmax_range(sets)?;
    Ok(ObjectiveVector::new(range.bounds().iter().map(|(lo, _)| lo - offset).collect())?)
}
