use rand_distr::{Distribution, Exp1};

use crate::{CoreError, Result, RngStream, WeightVector};

/// Uniform draw from the simplex Δ^D.
///
/// D unit-rate exponentials normalized by their sum (a flat Dirichlet).
pub fn sample_simplex_uniform(rng: &mut RngStream, dim: usize) -> Result<WeightVector> {
    if dim == 0 {
        return Err(CoreError::ZeroDimension);
    }
    if dim == 1 {
        return Ok(WeightVector::vertex(1, 0));
    }
    loop {
        let draws: Vec<f64> = (0..dim).map(|_| Exp1.sample(rng)).collect();
        let total: f64 = draws.iter().sum();
        if total > 0.0 && total.is_finite() {
            let mut weights: Vec<f64> = draws.iter().map(|x| x / total).collect();
            // Fold rounding residue into the largest entry so the sum is 1 to the last ulp or so.
            let residue = 1.0 - weights.iter().sum::<f64>();
            let big = (0..dim).max_by(|&a, &b| weights[a].total_cmp(&weights[b])).unwrap_or(0);
            weights[big] += residue;
            return WeightVector::new(weights);
        }
    }
}

fn binomial(n: u64, k: u64) -> u128 {
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        acc = acc.saturating_mul((n - i) as u128) / (i as u128 + 1);
    }
    acc
}

/// Granularity H whose lattice size C(H+D-1, D-1) is nearest to `n_target`.
///
/// Ties go to the smaller H. H is at least 1.
pub fn lattice_granularity(dim: usize, n_target: usize) -> Result<usize> {
    if dim == 0 {
        return Err(CoreError::ZeroDimension);
    }
    if n_target == 0 {
        return Err(CoreError::ZeroTarget);
    }
    if dim == 1 {
        return Ok(1);
    }
    let target = n_target as u128;
    let d = dim as u64 - 1;
    let mut best = (1usize, binomial(1 + d, d).abs_diff(target));
    let mut h = 2usize;
    loop {
        let count = binomial(h as u64 + d, d);
        let diff = count.abs_diff(target);
        if diff < best.1 {
            best = (h, diff);
        }
        if count >= target {
            break;
        }
        h += 1;
    }
    Ok(best.0)
}

/// The simplex lattice { h/H : h ∈ Z^D_{≥0}, Σh = H } with H picked by
/// [`lattice_granularity`], sorted lexicographically descending.
pub fn simplex_lattice(dim: usize, n_target: usize) -> Result<Vec<WeightVector>> {
    let h = lattice_granularity(dim, n_target)?;
    let mut out = Vec::new();
    let mut current = vec![0usize; dim];
    compositions(h, 0, &mut current, &mut |parts| {
        let weights: Vec<f64> = parts.iter().map(|&p| p as f64 / h as f64).collect();
        out.push(WeightVector::new(weights).expect("lattice point lies on the simplex"));
    });
    Ok(out)
}

fn compositions(remaining: usize, index: usize, current: &mut Vec<usize>, emit: &mut impl FnMut(&[usize])) {
    if index + 1 == current.len() {
        current[index] = remaining;
        emit(current);
        return;
    }
    for part in (0..=remaining).rev() {
        current[index] = part;
        compositions(remaining - part, index + 1, current, emit);
    }
}
