//! Independent reference implementations shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use stabcast::Method;

/// Random forecast matrices with `1..=max_o` origins and `1..=max_h` horizons.
pub fn matrix_strategy(max_o: usize, max_h: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_o, 1..=max_h)
        .prop_flat_map(|(o, h)| prop::collection::vec(prop::collection::vec(-1000.0f64..1000.0, h), o))
}

fn vertical_cell(f: &[Vec<f64>], i: usize, j: usize, w: f64, method: Method) -> f64 {
    let h = f[0].len();
    if i == 0 || j == h - 1 {
        return f[i][j];
    }
    let prev = match method {
        Method::Partial => f[i - 1][j + 1],
        Method::Full => vertical_cell(f, i - 1, j + 1, w, method),
    };
    w * prev + (1.0 - w) * f[i][j]
}

/// Direct recursive evaluation of vertical partial/full interpolation.
pub fn vertical_oracle(f: &[Vec<f64>], w: f64, method: Method) -> Vec<Vec<f64>> {
    (0..f.len())
        .map(|i| (0..f[i].len()).map(|j| vertical_cell(f, i, j, w, method)).collect())
        .collect()
}

fn horizontal_cell(f: &[f64], j: usize, w: f64, method: Method) -> f64 {
    if j == 0 {
        return f[0];
    }
    let prev = match method {
        Method::Partial => f[j - 1],
        Method::Full => horizontal_cell(f, j - 1, w, method),
    };
    w * prev + (1.0 - w) * f[j]
}

/// Direct recursive evaluation of horizontal partial/full interpolation.
pub fn horizontal_oracle(f: &[f64], w: f64, method: Method) -> Vec<f64> {
    (0..f.len()).map(|j| horizontal_cell(f, j, w, method)).collect()
}

/// Seasonal naive in-sample mean error, absolute (`squared = false`) or squared.
pub fn naive_scale(training: &[f64], m: usize, squared: bool) -> f64 {
    let mut total = 0.0;
    let mut count = 0;
    for i in m..training.len() {
        let d = training[i] - training[i - m];
        total += if squared { d * d } else { d.abs() };
        count += 1;
    }
    total / count as f64
}

fn mean_loss(pairs: &[(f64, f64)], squared: bool) -> f64 {
    let mut total = 0.0;
    for &(a, b) in pairs {
        let d = a - b;
        total += if squared { d * d } else { d.abs() };
    }
    total / pairs.len() as f64
}

/// Scaled absolute (`squared = false`) or root-squared measure of `pairs`.
pub fn scaled(pairs: &[(f64, f64)], training: &[f64], m: usize, squared: bool) -> f64 {
    let r = mean_loss(pairs, squared) / naive_scale(training, m, squared);
    if squared {
        r.sqrt()
    } else {
        r
    }
}

pub fn smape(pairs: &[(f64, f64)]) -> f64 {
    let mut total = 0.0;
    for &(a, b) in pairs {
        let den = a.abs() + b.abs();
        if den > 0.0 {
            total += 2.0 * (a - b).abs() / den;
        }
    }
    100.0 * total / pairs.len() as f64
}

/// Pairs compared by vertical change at 0-based origin `i >= 1`.
pub fn vertical_pairs(f: &[Vec<f64>], i: usize) -> Vec<(f64, f64)> {
    let h = f[i].len();
    (0..h - 1).map(|j| (f[i][j], f[i - 1][j + 1])).collect()
}

/// Pairs of origin `i` against the first forecast made for each target.
pub fn initial_pairs(f: &[Vec<f64>], i: usize) -> Vec<(f64, f64)> {
    let h = f[i].len();
    (0..h - 1)
        .map(|j| {
            // target offset from the first origin: i + j; the earliest origin
            // covering it is max(0, i + j - (h - 1))
            let t = i + j;
            let k0 = t.saturating_sub(h - 1);
            (f[i][j], f[k0][t - k0])
        })
        .collect()
}

pub fn horizontal_pairs(row: &[f64], initial: bool) -> Vec<(f64, f64)> {
    (1..row.len())
        .map(|j| (row[j], if initial { row[0] } else { row[j - 1] }))
        .collect()
}

/// Two-sided signed-rank p-value by enumerating all sign patterns of the
/// non-zero differences (average ranks for ties).
pub fn wilcoxon_enumerated(diffs: &[f64]) -> Option<f64> {
    let d: Vec<f64> = diffs.iter().copied().filter(|v| *v != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return None;
    }
    let ranks: Vec<f64> = d
        .iter()
        .map(|x| {
            let less = d.iter().filter(|y| y.abs() < x.abs()).count() as f64;
            let equal = d.iter().filter(|y| y.abs() == x.abs()).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect();
    let observed: f64 = d.iter().zip(&ranks).filter(|(x, _)| **x > 0.0).map(|(_, r)| r).sum();
    let (mut le, mut ge) = (0u64, 0u64);
    for mask in 0u64..(1 << n) {
        let w: f64 = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| ranks[b]).sum();
        if w <= observed + 1e-9 {
            le += 1;
        }
        if w >= observed - 1e-9 {
            ge += 1;
        }
    }
    let total = (1u64 << n) as f64;
    Some((2.0 * le.min(ge) as f64 / total).min(1.0))
}

/// One-sided `P(W+ >= observed)` by enumeration.
pub fn wilcoxon_upper_enumerated(diffs: &[f64]) -> Option<f64> {
    let d: Vec<f64> = diffs.iter().copied().filter(|v| *v != 0.0).collect();
    let n = d.len();
    if n == 0 {
        return None;
    }
    let ranks: Vec<f64> = d
        .iter()
        .map(|x| {
            let less = d.iter().filter(|y| y.abs() < x.abs()).count() as f64;
            let equal = d.iter().filter(|y| y.abs() == x.abs()).count() as f64;
            less + (equal + 1.0) / 2.0
        })
        .collect();
    let observed: f64 = d.iter().zip(&ranks).filter(|(x, _)| **x > 0.0).map(|(_, r)| r).sum();
    let ge = (0u64..(1 << n))
        .filter(|mask| (0..n).filter(|b| mask >> b & 1 == 1).map(|b| ranks[b]).sum::<f64>() >= observed - 1e-9)
        .count();
    Some(ge as f64 / (1u64 << n) as f64)
}
