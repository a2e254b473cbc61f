use statrs::distribution::{ContinuousCDF, Normal, StudentsT};

use crate::{MetricsError, Result};

/// A rank-correlation coefficient with its two-sided p-value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub coefficient: f64,
    pub p_value: f64,
}

fn check_finite(values: &[f64]) -> Result<()> {
    match values.iter().enumerate().find(|(_, v)| !v.is_finite()) {
        Some((index, &value)) => Err(MetricsError::NonFinite { index, value }),
        None => Ok(()),
    }
}

/// 1-based ranks; ties share the mean of the ranks they span.
pub fn average_ranks(values: &[f64]) -> Result<Vec<f64>> {
    if values.is_empty() {
        return Err(MetricsError::Empty("rank input"));
    }
    check_finite(values)?;
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let shared = (start + 1 + end) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = shared;
        }
        start = end;
    }
    Ok(ranks)
}

fn check_pair(x: &[f64], y: &[f64]) -> Result<()> {
    if x.len() != y.len() {
        return Err(MetricsError::LengthMismatch { left: x.len(), right: y.len() });
    }
    if x.len() < 3 {
        return Err(MetricsError::TooFewSamples(x.len()));
    }
    check_finite(x)?;
    check_finite(y)
}

/// Spread small enough that the variable is treated as constant.
fn is_degenerate(values: &[f64]) -> bool {
    let (lo, hi) = values.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let scale = lo.abs().max(hi.abs()).max(1.0);
    hi - lo <= 1e-12 * scale
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0)
}

/// Spearman's rho with a two-sided p-value from the t approximation on n-2
/// degrees of freedom.
///
/// Returns `Ok(None)` when either input is (near) constant, since the
/// coefficient is undefined there.
pub fn spearman(x: &[f64], y: &[f64]) -> Result<Option<Correlation>> {
    check_pair(x, y)?;
    if is_degenerate(x) || is_degenerate(y) {
        return Ok(None);
    }
    let mut rho = pearson(&average_ranks(x)?, &average_ranks(y)?);
    if 1.0 - rho.abs() <= 4.0 * f64::EPSILON {
        rho = rho.signum();
    }
    let n = x.len() as f64;
    let dof = n - 2.0;
    let denom = 1.0 - rho * rho;
    let p_value = if denom <= 0.0 {
        0.0
    } else {
        let t = rho * (dof / denom).sqrt();
        let dist = StudentsT::new(0.0, 1.0, dof).expect("positive degrees of freedom");
        (2.0 * dist.sf(t.abs())).min(1.0)
    };
    Ok(Some(Correlation { coefficient: rho, p_value }))
}

/// Per-group statistics of tied values: (Σ t(t-1)/2, Σ t(t-1)(t-2), Σ t(t-1)(2t+5)).
fn tie_stats(values: &[f64]) -> (f64, f64, f64) {
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let (mut pairs, mut cubic, mut var_term) = (0.0, 0.0, 0.0);
    let mut start = 0;
    while start < sorted.len() {
        let mut end = start + 1;
        while end < sorted.len() && sorted[end] == sorted[start] {
            end += 1;
        }
        let t = (end - start) as f64;
        if t > 1.0 {
            pairs += t * (t - 1.0) / 2.0;
            cubic += t * (t - 1.0) * (t - 2.0);
            var_term += t * (t - 1.0) * (2.0 * t + 5.0);
        }
        start = end;
    }
    (pairs, cubic, var_term)
}

/// Kendall's tau-b with a two-sided p-value from the tie-corrected normal
/// approximation to the concordance statistic.
pub fn kendall_tau(x: &[f64], y: &[f64]) -> Result<Option<Correlation>> {
    check_pair(x, y)?;
    if is_degenerate(x) || is_degenerate(y) {
        return Ok(None);
    }
    let n = x.len();
    let mut score = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let s = (x[i] - x[j]).signum() * (y[i] - y[j]).signum();
            // signum(0.0) is 1.0, so ties have to be masked explicitly
            if x[i] != x[j] && y[i] != y[j] {
                score += s;
            }
        }
    }
    let nf = n as f64;
    let total = nf * (nf - 1.0) / 2.0;
    let (x_pairs, x_cubic, x_var) = tie_stats(x);
    let (y_pairs, y_cubic, y_var) = tie_stats(y);
    let tau = (score / ((total - x_pairs).sqrt() * (total - y_pairs).sqrt())).clamp(-1.0, 1.0);

    let m = nf * (nf - 1.0);
    let variance = (m * (2.0 * nf + 5.0) - x_var - y_var) / 18.0
        + (2.0 * x_pairs * y_pairs) / m
        + x_cubic * y_cubic / (9.0 * m * (nf - 2.0));
    let z = score / variance.sqrt();
    let normal = Normal::standard();
    let p_value = (2.0 * normal.sf(z.abs())).min(1.0);
    Ok(Some(Correlation { coefficient: tau, p_value }))
}
