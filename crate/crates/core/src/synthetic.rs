//! Seeded generator of seasonal series with trend and noise.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::error::{Error, Result};
use crate::types::{Dataset, TimeSeries};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SyntheticSpec {
    pub series: usize,
    pub length: usize,
    pub period: usize,
    /// Noise standard deviation as a fraction of the series level.
    pub noise: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            series: 10,
            length: 120,
            period: 12,
            noise: 0.05,
            seed: 42,
        }
    }
}

/// `level + slope * t + amplitude * sin(2 pi t / m + phase) + noise`, with
/// per-series parameters drawn from the seeded generator.
pub fn generate(spec: &SyntheticSpec) -> Result<Dataset> {
    if spec.series == 0 || spec.length == 0 || spec.period == 0 {
        return Err(Error::Domain("series count, length and period must be positive".into()));
    }
    if !(spec.noise >= 0.0 && spec.noise.is_finite()) {
        return Err(Error::Domain(format!(
            "noise level {} must be non-negative",
            spec.noise
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let std = Normal::new(0.0, 1.0).map_err(|e| Error::Domain(e.to_string()))?;
    let series = (0..spec.series)
        .map(|i| {
            let level: f64 = rng.random_range(50.0..150.0);
            let slope = level * rng.random_range(-0.002..0.006);
            let amplitude = level * rng.random_range(0.05..0.25);
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            let sd = level * spec.noise;
            let values = (0..spec.length)
                .map(|t| {
                    let t = t as f64;
                    let season = (std::f64::consts::TAU * t / spec.period as f64 + phase).sin();
                    level + slope * t + amplitude * season + sd * std.sample(&mut rng)
                })
                .collect();
            TimeSeries::new(format!("S{:04}", i + 1), values, spec.period)
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new("synthetic", "", series)
}
