//! Wilcoxon signed-rank test and Bonferroni correction.

use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};

/// Largest effective sample size evaluated with the exact null distribution.
pub const EXACT_LIMIT: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WilcoxonResult {
    /// Sum of ranks of positive differences.
    pub w_plus: f64,
    /// Number of non-zero differences.
    pub n: usize,
    pub p_value: f64,
    /// One-sided `P(W+ >= w_plus)`: evidence that differences tend positive.
    pub p_greater: f64,
    pub exact: bool,
}

/// Average ranks (1-based) of `values`, ties sharing their mean rank.
pub fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && values[idx[j + 1]] == values[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

/// Two-sided signed-rank test on the paired differences `a - b`.
/// Returns `None` when every difference is zero.
pub fn wilcoxon_signed_rank(a: &[f64], b: &[f64]) -> Result<Option<WilcoxonResult>> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!(
            "paired samples of different lengths ({} and {})",
            a.len(),
            b.len()
        )));
    }
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::Domain("paired samples must be finite".into()));
    }
    Ok(signed_rank(&diffs))
}

/// Signed-rank test on differences directly.
pub fn signed_rank(diffs: &[f64]) -> Option<WilcoxonResult> {
    let nonzero: Vec<f64> = diffs.iter().copied().filter(|d| *d != 0.0).collect();
    let n = nonzero.len();
    if n == 0 {
        return None;
    }
    let abs: Vec<f64> = nonzero.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs);
    let w_plus: f64 = nonzero
        .iter()
        .zip(&ranks)
        .filter(|(d, _)| **d > 0.0)
        .map(|(_, r)| r)
        .sum();
    let ((lower, upper), exact) = if n <= EXACT_LIMIT {
        (exact_tails(&ranks, w_plus), true)
    } else {
        (normal_tails(&ranks, w_plus), false)
    };
    Some(WilcoxonResult {
        w_plus,
        n,
        p_value: (2.0 * lower.min(upper)).min(1.0),
        p_greater: upper,
        exact,
    })
}

/// Exact tail probabilities `(P(W+ <= w), P(W+ >= w))`. Ranks are doubled so tied half-ranks become
/// integers; the null distribution of the doubled W+ is built by dynamic
/// programming over the sign of each rank.
fn exact_tails(ranks: &[f64], w_plus: f64) -> (f64, f64) {
    let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
    let total: usize = doubled.iter().sum();
    let mut counts = vec![0u128; total + 1];
    counts[0] = 1;
    let mut reach = 0;
    for &r in &doubled {
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    let observed = (2.0 * w_plus).round() as usize;
    let all: u128 = counts.iter().sum();
    let lower: u128 = counts[..=observed].iter().sum();
    let upper: u128 = counts[observed..].iter().sum();
    (lower as f64 / all as f64, upper as f64 / all as f64)
}

/// Normal approximation of the tails with tie and continuity corrections.
fn normal_tails(ranks: &[f64], w_plus: f64) -> (f64, f64) {
    let n = ranks.len() as f64;
    let mean = n * (n + 1.0) / 4.0;
    let mut ties = 0.0;
    let mut sorted = ranks.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let j = sorted[i..].iter().take_while(|r| **r == sorted[i]).count();
        let t = j as f64;
        ties += t * t * t - t;
        i += j;
    }
    let var = n * (n + 1.0) * (2.0 * n + 1.0) / 24.0 - ties / 48.0;
    if var <= 0.0 {
        return (1.0, 1.0);
    }
    let sd = var.sqrt();
    let std = Normal::standard();
    let lower = std.cdf((w_plus - mean + 0.5) / sd);
    let upper = std.sf((w_plus - mean - 0.5) / sd);
    (lower.min(1.0), upper.min(1.0))
}

/// Bonferroni-corrected significance level `alpha / comparisons`.
pub fn bonferroni(alpha: f64, comparisons: usize) -> Result<f64> {
    if comparisons < 1 {
        return Err(Error::Domain("comparison count must be at least 1".into()));
    }
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::Domain(format!("alpha {alpha} not in (0, 1]")));
    }
    Ok(alpha / comparisons as f64)
}
