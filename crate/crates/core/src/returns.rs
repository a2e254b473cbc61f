use crate::vectors::check_dims;
use crate::{CoreError, DiscountSpec, ObjectiveVector, Result};

/// Σ_t γ^t r_t, accumulated backwards in f64.
pub fn discounted_return(rewards: &[ObjectiveVector], spec: DiscountSpec) -> Result<ObjectiveVector> {
    let first = rewards.first().ok_or(CoreError::EmptySequence)?;
    let dim = first.dim();
    let gamma = spec.gamma();
    let mut acc = vec![0.0; dim];
    for r in rewards.iter().rev() {
        check_dims(dim, r.dim())?;
        for (a, &x) in acc.iter_mut().zip(r.iter()) {
            *a = x + gamma * *a;
        }
    }
    ObjectiveVector::new(acc)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ov(v: &[f64]) -> ObjectiveVector {
        ObjectiveVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn single_step() {
        let g = DiscountSpec::new(0.9).unwrap();
        assert_eq!(discounted_return(&[ov(&[0.1, 0.0, 0.0])], g).unwrap(), ov(&[0.1, 0.0, 0.0]));
    }

    #[test]
    fn zero_gamma_keeps_first_reward() {
        let g = DiscountSpec::new(0.0).unwrap();
        let rs = [ov(&[1.0, -2.0]), ov(&[5.0, 5.0]), ov(&[7.0, 1.0])];
        assert_eq!(discounted_return(&rs, g).unwrap(), ov(&[1.0, -2.0]));
    }

    #[test]
    fn hand_unroll() {
        let g = DiscountSpec::new(0.5).unwrap();
        let rs = [ov(&[1.0, 0.0]), ov(&[0.0, 1.0])];
        assert_eq!(discounted_return(&rs, g).unwrap(), ov(&[1.0, 0.5]));
    }

    #[test]
    fn zeros_stay_zero() {
        for gamma in [0.0, 0.5, 0.9997] {
            let rs = vec![ObjectiveVector::zeros(3); 50];
            let out = discounted_return(&rs, DiscountSpec::new(gamma).unwrap()).unwrap();
            assert_eq!(out, ObjectiveVector::zeros(3));
        }
    }

    #[test]
    fn errors() {
        let g = DiscountSpec::new(0.5).unwrap();
        assert_eq!(discounted_return(&[], g).unwrap_err(), CoreError::EmptySequence);
        let rs = [ov(&[1.0]), ov(&[1.0, 2.0])];
        assert!(matches!(discounted_return(&rs, g), Err(CoreError::DimensionMismatch { .. })));
    }

    #[test]
    fn long_horizon_matches_geometric_series() {
        let gamma = 0.9997;
        let n = 3000;
        let rs = vec![ov(&[1.0]); n];
        let out = discounted_return(&rs, DiscountSpec::new(gamma).unwrap()).unwrap();
        let expected = (1.0 - gamma.powi(n as i32)) / (1.0 - gamma);
        assert!((out[0] - expected).abs() < 1e-9);
    }
}
