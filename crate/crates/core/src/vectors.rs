use std::ops::Index;

use crate::{CoreError, Result};

/// Weights must sum to one within this tolerance.
pub const WEIGHT_SUM_TOLERANCE: f64 = 1e-9;

/// A point in R^D: a reward, a return, or a value estimate.
///
/// Objective order is fixed by the environment that produced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveVector(Vec<f64>);

impl ObjectiveVector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(CoreError::EmptyVector);
        }
        if let Some((index, &value)) = values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
            return Err(CoreError::NonFinite { index, value });
        }
        Ok(Self(values))
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "objective vector dimension must be positive");
        Self(vec![0.0; dim])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    pub fn sum(&self) -> f64 {
        self.0.iter().sum()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `self + scale * other`, component-wise.
    pub fn add_scaled(&self, other: &ObjectiveVector, scale: f64) -> Result<ObjectiveVector> {
        check_dims(self.dim(), other.dim())?;
        ObjectiveVector::new(self.0.iter().zip(&other.0).map(|(a, b)| a + scale * b).collect())
    }

    pub fn scaled(&self, factor: f64) -> Result<ObjectiveVector> {
        ObjectiveVector::new(self.0.iter().map(|v| v * factor).collect())
    }
}

impl Index<usize> for ObjectiveVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

impl TryFrom<Vec<f64>> for ObjectiveVector {
    type Error = CoreError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

/// A linear preference: a point on the (D-1)-simplex.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(CoreError::EmptyVector);
        }
        for (index, &value) in weights.iter().enumerate() {
            if !value.is_finite() {
                return Err(CoreError::NonFinite { index, value });
            }
            if value < 0.0 {
                return Err(CoreError::NegativeWeight { index, value });
            }
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > WEIGHT_SUM_TOLERANCE {
            return Err(CoreError::WeightSum { sum });
        }
        Ok(Self(weights))
    }

    /// Equal importance on every objective.
    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0, "weight vector dimension must be positive");
        Self(vec![1.0 / dim as f64; dim])
    }

    /// All weight on objective `index`.
    pub fn vertex(dim: usize, index: usize) -> Self {
        assert!(index < dim, "vertex index {index} out of range for dimension {dim}");
        let mut w = vec![0.0; dim];
        w[index] = 1.0;
        Self(w)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// Index of the largest weight; the lowest index wins ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &w) in self.0.iter().enumerate().skip(1) {
            if w > self.0[best] {
                best = i;
            }
        }
        best
    }
}

impl Index<usize> for WeightVector {
    type Output = f64;

    fn index(&self, index: usize) -> &f64 {
        &self.0[index]
    }
}

impl TryFrom<Vec<f64>> for WeightVector {
    type Error = CoreError;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Self::new(values)
    }
}

/// Discount factor in [0, 1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscountSpec(f64);

impl DiscountSpec {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&gamma) {
            return Err(CoreError::InvalidDiscount(gamma));
        }
        Ok(Self(gamma))
    }

    pub fn gamma(self) -> f64 {
        self.0
    }
}

/// Linear utility of `v` under preference `w`.
pub fn scalarize(v: &ObjectiveVector, w: &WeightVector) -> Result<f64> {
    check_dims(v.dim(), w.dim())?;
    Ok(v.iter().zip(w.iter()).map(|(a, b)| a * b).sum())
}

pub(crate) fn check_dims(left: usize, right: usize) -> Result<()> {
    if left != right {
        return Err(CoreError::DimensionMismatch { left, right });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn ov(v: &[f64]) -> ObjectiveVector {
        ObjectiveVector::new(v.to_vec()).unwrap()
    }

    fn wv(v: &[f64]) -> WeightVector {
        WeightVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn scalarize_examples() {
        assert_eq!(scalarize(&ov(&[1.0, 0.0, 0.0]), &wv(&[1.0, 0.0, 0.0])).unwrap(), 1.0);
        assert_eq!(scalarize(&ov(&[2.0, 4.0]), &wv(&[0.5, 0.5])).unwrap(), 3.0);
        let w = wv(&[0.2, 0.5, 0.3]);
        assert!((scalarize(&ov(&[1.0, 1.0, 1.0]), &w).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn scalarize_dimension_mismatch_names_both_lengths() {
        let err = scalarize(&ov(&[1.0, 2.0]), &wv(&[0.2, 0.5, 0.3])).unwrap_err();
        assert_eq!(err, CoreError::DimensionMismatch { left: 2, right: 3 });
        let msg = err.to_string();
        assert!(msg.contains('2') && msg.contains('3'));
    }

    #[test]
    fn objective_vector_rejects_non_finite_and_empty() {
        assert!(matches!(ObjectiveVector::new(vec![]), Err(CoreError::EmptyVector)));
        assert!(matches!(
            ObjectiveVector::new(vec![0.0, f64::NAN]),
            Err(CoreError::NonFinite { index: 1, .. })
        ));
        assert!(ObjectiveVector::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn weight_vector_invariants() {
        assert!(WeightVector::new(vec![0.5, 0.5]).is_ok());
        assert!(WeightVector::new(vec![0.5, 0.5 + 5e-10]).is_ok());
        assert!(matches!(WeightVector::new(vec![0.5, 0.6]), Err(CoreError::WeightSum { .. })));
        assert!(matches!(
            WeightVector::new(vec![1.5, -0.5]),
            Err(CoreError::NegativeWeight { index: 1, .. })
        ));
    }

    #[test]
    fn argmax_prefers_lowest_index() {
        assert_eq!(WeightVector::uniform(3).argmax(), 0);
        assert_eq!(wv(&[0.2, 0.5, 0.3]).argmax(), 1);
        assert_eq!(wv(&[0.0, 0.5, 0.5]).argmax(), 1);
    }

    #[test]
    fn discount_range() {
        assert!(DiscountSpec::new(0.0).is_ok());
        assert!(DiscountSpec::new(0.9997).is_ok());
        assert!(DiscountSpec::new(1.0).is_err());
        assert!(DiscountSpec::new(-0.1).is_err());
        assert!(DiscountSpec::new(f64::NAN).is_err());
    }

    fn simplex_point(d: usize) -> impl Strategy<Value = WeightVector> {
        prop::collection::vec(0.001f64..1.0, d).prop_map(|raw| {
            let s: f64 = raw.iter().sum();
            WeightVector::new(raw.iter().map(|x| x / s).collect()).unwrap()
        })
    }

    proptest! {
        #[test]
        fn scalarize_is_linear(
            (u, v, w) in (1usize..6).prop_flat_map(|d| (
                prop::collection::vec(-10.0f64..10.0, d),
                prop::collection::vec(-10.0f64..10.0, d),
                simplex_point(d),
            )),
            alpha in -5.0f64..5.0,
            beta in -5.0f64..5.0,
        ) {
            let u = ObjectiveVector::new(u).unwrap();
            let v = ObjectiveVector::new(v).unwrap();
            let combo = u.scaled(alpha).unwrap().add_scaled(&v, beta).unwrap();
            let lhs = scalarize(&combo, &w).unwrap();
            let rhs = alpha * scalarize(&u, &w).unwrap() + beta * scalarize(&v, &w).unwrap();
            prop_assert!((lhs - rhs).abs() < 1e-12, "lhs {lhs} rhs {rhs}");
        }
    }
}
