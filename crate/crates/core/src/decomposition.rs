//! Classical additive seasonal-trend decomposition with a single period.

use crate::error::{Error, Result};
use crate::models::{holt_linear, HoltParams};

#[derive(Debug, Clone, PartialEq)]
pub struct Decomposition {
    pub trend: Vec<f64>,
    pub seasonal: Vec<f64>,
    pub remainder: Vec<f64>,
    pub period: usize,
}

impl Decomposition {
    pub fn len(&self) -> usize {
        self.trend.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trend.is_empty()
    }

    /// One seasonal index per phase, `indices[q]` for times `t` with
    /// `(t - 1) % m == q`.
    pub fn seasonal_indices(&self) -> &[f64] {
        &self.seasonal[..self.period.min(self.seasonal.len())]
    }
}

/// Centered moving average of order `m` (a 2 x m average for even `m`).
/// Returns the averages for positions `k..n-k` and the half-width `k`.
fn centered_moving_average(values: &[f64], m: usize) -> (Vec<f64>, usize) {
    let n = values.len();
    if m % 2 == 1 {
        let k = (m - 1) / 2;
        let avg = (k..n - k)
            .map(|t| values[t - k..=t + k].iter().sum::<f64>() / m as f64)
            .collect();
        (avg, k)
    } else {
        let k = m / 2;
        let avg = (k..n - k)
            .map(|t| {
                let inner: f64 = values[t - k + 1..t + k].iter().sum();
                (0.5 * values[t - k] + inner + 0.5 * values[t + k]) / m as f64
            })
            .collect();
        (avg, k)
    }
}

/// Least-squares line through `(x0 + i, ys[i])`, evaluated at `x`.
fn line_through(x0: usize, ys: &[f64]) -> impl Fn(f64) -> f64 {
    let n = ys.len() as f64;
    let xs = (0..ys.len()).map(|i| (x0 + i) as f64);
    let x_mean = xs.clone().sum::<f64>() / n;
    let y_mean = ys.iter().sum::<f64>() / n;
    let (sxy, sxx) = xs.zip(ys).fold((0.0, 0.0), |(sxy, sxx), (x, y)| {
        (sxy + (x - x_mean) * (y - y_mean), sxx + (x - x_mean).powi(2))
    });
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    move |x| y_mean + slope * (x - x_mean)
}

/// Splits `values` into trend, seasonal and remainder with
/// `trend + seasonal + remainder == values`.
///
/// The trend is a centered moving average whose undefined ends are filled
/// by extending a line fitted to the nearest `m` interior values. Seasonal
/// indices average the detrended interior by phase and are re-centered to
/// sum to zero.
pub fn decompose(values: &[f64], m: usize) -> Result<Decomposition> {
    if m == 0 {
        return Err(Error::Domain("seasonal period must be positive".into()));
    }
    let n = values.len();
    if n < 2 * m + 1 {
        return Err(Error::insufficient(2 * m + 1, n));
    }

    let (interior, k) = centered_moving_average(values, m);
    let mut trend = vec![0.0; n];
    trend[k..n - k].copy_from_slice(&interior);
    if k > 0 {
        let fit_len = m.min(interior.len()).max(2);
        let left = line_through(k, &interior[..fit_len]);
        for (t, v) in trend.iter_mut().enumerate().take(k) {
            *v = left(t as f64);
        }
        let start = n - k - fit_len;
        let right = line_through(start, &interior[interior.len() - fit_len..]);
        for (t, v) in trend.iter_mut().enumerate().skip(n - k) {
            *v = right(t as f64);
        }
    }

    let mut sums = vec![0.0; m];
    let mut counts = vec![0usize; m];
    for t in k..n - k {
        sums[t % m] += values[t] - trend[t];
        counts[t % m] += 1;
    }
    let mut indices: Vec<f64> = sums
        .iter()
        .zip(&counts)
        .map(|(s, &c)| if c > 0 { s / c as f64 } else { 0.0 })
        .collect();
    let centre = indices.iter().sum::<f64>() / m as f64;
    indices.iter_mut().for_each(|s| *s -= centre);

    let seasonal: Vec<f64> = (0..n).map(|t| indices[t % m]).collect();
    let remainder = values
        .iter()
        .zip(&trend)
        .zip(&seasonal)
        .map(|((y, t), s)| y - t - s)
        .collect();
    Ok(Decomposition {
        trend,
        seasonal,
        remainder,
        period: m,
    })
}

/// Forecast of trend + seasonal: the last observed season repeated plus a
/// Holt linear forecast of the trend.
pub fn forecast_components(d: &Decomposition, h: usize, trend_params: HoltParams) -> Result<Vec<f64>> {
    let n = d.len();
    let m = d.period;
    if n < m || n < 2 {
        return Err(Error::insufficient(m.max(2), n));
    }
    let season = &d.seasonal[n - m..];
    let trend = holt_linear(&d.trend, h, trend_params)?;
    Ok(trend.into_iter().enumerate().map(|(j, t)| t + season[j % m]).collect())
}

pub fn recompose(remainder: &[f64], components: &[f64]) -> Result<Vec<f64>> {
    if remainder.len() != components.len() {
        return Err(Error::Shape(format!(
            "remainder forecast has {} steps, component forecast {}",
            remainder.len(),
            components.len()
        )));
    }
    Ok(remainder.iter().zip(components).map(|(r, c)| r + c).collect())
}
