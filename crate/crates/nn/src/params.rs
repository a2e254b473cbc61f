use morl_core::RngStream;
use ndarray::{Array2, ArrayView2};
use rand_distr::{Distribution, StandardNormal};

use crate::{NetworkConfig, NnError, Result};

/// One tensor inside the flat parameter vector (row-major).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TensorShape {
    pub rows: usize,
    pub cols: usize,
    pub offset: usize,
}

impl TensorShape {
    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn range(&self) -> std::ops::Range<usize> {
        self.offset..self.offset + self.len()
    }
}

/// Flat parameter vector plus the shape table that slices it into layers.
#[derive(Debug, Clone, PartialEq)]
pub struct NetworkParams {
    values: Vec<f64>,
    shapes: Vec<TensorShape>,
}

impl NetworkParams {
    pub fn zeros(config: &NetworkConfig) -> Self {
        let shapes = config.param_shapes();
        Self { values: vec![0.0; config.param_count()], shapes }
    }

    pub fn from_values(config: &NetworkConfig, values: Vec<f64>) -> Result<Self> {
        let expected = config.param_count();
        if values.len() != expected {
            return Err(NnError::Length { expected, got: values.len() });
        }
        Ok(Self { values, shapes: config.param_shapes() })
    }

    /// Orthogonal hidden layers with gain √2, logits head with gain 0.01,
    /// value head with gain 1, zero biases.
    pub fn init(config: &NetworkConfig, rng: &mut RngStream) -> Result<Self> {
        config.validate()?;
        let mut params = Self::zeros(config);
        let layers = params.shapes.len() / 2;
        for layer in 0..layers {
            let gain = if layer + 2 < layers {
                std::f64::consts::SQRT_2
            } else if layer + 2 == layers {
                0.01
            } else {
                1.0
            };
            let shape = params.shapes[2 * layer];
            let w = orthogonal(shape.rows, shape.cols, gain, rng);
            params.values[shape.range()].copy_from_slice(w.as_slice().expect("standard layout"));
        }
        Ok(params)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn shapes(&self) -> &[TensorShape] {
        &self.shapes
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn as_mut_slice(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.values
    }

    pub fn tensor(&self, index: usize) -> ArrayView2<'_, f64> {
        let s = self.shapes[index];
        ArrayView2::from_shape((s.rows, s.cols), &self.values[s.range()]).expect("shape table matches storage")
    }
}

/// Random matrix with orthonormal rows or columns (whichever are fewer),
/// scaled by `gain`.
fn orthogonal(rows: usize, cols: usize, gain: f64, rng: &mut RngStream) -> Array2<f64> {
    let (count, len) = if rows >= cols { (cols, rows) } else { (rows, cols) };
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(count);
    while basis.len() < count {
        let mut v: Vec<f64> = (0..len).map(|_| StandardNormal.sample(rng)).collect();
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    Array2::from_shape_fn((rows, cols), |(r, c)| gain * if rows >= cols { basis[c][r] } else { basis[r][c] })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn orthogonal_columns() {
        let mut rng = RngStream::new(0, 0);
        let m = orthogonal(10, 4, 1.0, &mut rng);
        let g = m.t().dot(&m);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if i == j { 1.0 } else { 0.0 };
                assert!((g[[i, j]] - expect).abs() < 1e-12);
            }
        }
        let wide = orthogonal(3, 7, 2.0, &mut rng);
        let g = wide.dot(&wide.t());
        assert!((g[[1, 1]] - 4.0).abs() < 1e-12 && g[[0, 2]].abs() < 1e-12);
    }

    #[test]
    fn init_gains_and_biases() {
        let config = NetworkConfig::new(5, 3, 2, false).with_hidden(vec![16, 16]);
        let p = NetworkParams::init(&config, &mut RngStream::new(1, 0)).unwrap();
        assert_eq!(p.len(), config.param_count());
        for (i, s) in p.shapes().iter().enumerate() {
            if i % 2 == 1 {
                assert!(p.as_slice()[s.range()].iter().all(|&b| b == 0.0));
            }
        }
        let logits = p.tensor(4);
        let largest = logits.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
        assert!(largest <= 0.01 + 1e-12);
    }

    #[test]
    fn from_values_checks_length() {
        let config = NetworkConfig::new(2, 2, 1, false).with_hidden(vec![3]);
        assert!(NetworkParams::from_values(&config, vec![0.0; 5]).is_err());
        assert!(NetworkParams::from_values(&config, vec![0.0; config.param_count()]).is_ok());
    }
}
