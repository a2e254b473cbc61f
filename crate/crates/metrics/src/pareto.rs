use std::cmp::Ordering;

use morl_core::ObjectiveVector;

use crate::error::check_dims;
use crate::{MetricsError, Result};

/// Pareto dominance for maximization: `a` is at least as good everywhere and
/// strictly better somewhere.
pub fn dominates(a: &ObjectiveVector, b: &ObjectiveVector) -> Result<bool> {
    check_dims(a.dim(), b.dim())?;
    Ok(dominates_raw(a.as_slice(), b.as_slice()))
}

pub(crate) fn dominates_raw(a: &[f64], b: &[f64]) -> bool {
    let mut strict = false;
    for (x, y) in a.iter().zip(b) {
        if x < y {
            return false;
        }
        if x > y {
            strict = true;
        }
    }
    strict
}

/// A set of mutually non-dominated objective vectors.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoFront {
    points: Vec<ObjectiveVector>,
}

impl ParetoFront {
    /// Wraps `points` after checking that none dominates another.
    pub fn try_new(points: Vec<ObjectiveVector>) -> Result<Self> {
        if let Some(first) = points.first() {
            for p in &points {
                check_dims(first.dim(), p.dim())?;
            }
        }
        for (i, a) in points.iter().enumerate() {
            for (j, b) in points.iter().enumerate() {
                if i != j && dominates_raw(a.as_slice(), b.as_slice()) {
                    return Err(MetricsError::NotAFront(i, j));
                }
            }
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[ObjectiveVector] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn dim(&self) -> Option<usize> {
        self.points.first().map(ObjectiveVector::dim)
    }
}

fn lex_desc(a: &[f64], b: &[f64]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        match y.total_cmp(x) {
            Ordering::Equal => continue,
            other => return other,
        }
    }
    Ordering::Equal
}

/// Non-dominated subset of `points`, duplicates collapsed.
///
/// Points are visited in lexicographically descending order; any dominator of
/// a point sorts before it, so each candidate only has to be compared against
/// the front kept so far.
pub fn pareto_filter(points: &[ObjectiveVector]) -> Result<ParetoFront> {
    let first = points.first().ok_or(MetricsError::Empty("point set"))?;
    for p in points {
        check_dims(first.dim(), p.dim())?;
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&i, &j| lex_desc(points[i].as_slice(), points[j].as_slice()));

    let mut kept: Vec<usize> = Vec::new();
    for i in order {
        let candidate = points[i].as_slice();
        let covered = kept.iter().any(|&k| {
            let other = points[k].as_slice();
            other == candidate || dominates_raw(other, candidate)
        });
        if !covered {
            kept.push(i);
        }
    }
    Ok(ParetoFront { points: kept.into_iter().map(|i| points[i].clone()).collect() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(v: &[f64]) -> ObjectiveVector {
        ObjectiveVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn dominance_examples() {
        assert!(dominates(&ov(&[1.0, 1.0]), &ov(&[0.0, 0.0])).unwrap());
        assert!(!dominates(&ov(&[1.0, 0.0]), &ov(&[0.0, 1.0])).unwrap());
        assert!(!dominates(&ov(&[1.0, 1.0]), &ov(&[1.0, 1.0])).unwrap());
        assert!(dominates(&ov(&[1.0]), &ov(&[1.0, 2.0])).is_err());
    }

    #[test]
    fn filter_examples() {
        let front = pareto_filter(&[ov(&[1.0, 1.0]), ov(&[0.0, 0.0])]).unwrap();
        assert_eq!(front.points(), &[ov(&[1.0, 1.0])]);

        let pts = [ov(&[1.0, 0.0]), ov(&[0.0, 1.0]), ov(&[0.4, 0.4])];
        let front = pareto_filter(&pts).unwrap();
        assert_eq!(front.len(), 3);
        for p in &pts {
            assert!(front.points().contains(p));
        }
    }

    #[test]
    fn duplicates_collapse() {
        let pts = [ov(&[1.0, 2.0]), ov(&[1.0, 2.0]), ov(&[2.0, 1.0]), ov(&[0.5, 0.5])];
        let front = pareto_filter(&pts).unwrap();
        assert_eq!(front.len(), 2);
    }

    #[test]
    fn empty_input_is_an_error() {
        assert!(matches!(pareto_filter(&[]), Err(MetricsError::Empty(_))));
    }

    #[test]
    fn try_new_rejects_dominated_points() {
        assert!(ParetoFront::try_new(vec![ov(&[1.0, 1.0]), ov(&[0.0, 1.0])]).is_err());
        assert!(ParetoFront::try_new(vec![ov(&[1.0, 0.0]), ov(&[0.0, 1.0])]).is_ok());
    }
}
