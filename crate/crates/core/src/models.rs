//! Built-in base forecasters and the rolling-origin driver.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::types::{first_origin_for, Dataset, ForecastMatrix, TimeSeries};

const RIDGE_JITTER: f64 = 1e-8;

/// Number of lags for the pooled regression: `ceil(1.25 * m)`.
pub fn lag_heuristic(m: usize) -> usize {
    // 1.25 * m = 5m / 4
    (5 * m.max(1)).div_ceil(4)
}

/// Repeats the last observed season.
pub fn seasonal_naive(values: &[f64], m: usize, h: usize) -> Result<Vec<f64>> {
    if m == 0 {
        return Err(Error::Domain("seasonal period must be positive".into()));
    }
    if values.len() < m {
        return Err(Error::insufficient(m, values.len()));
    }
    let last = &values[values.len() - m..];
    Ok((0..h).map(|j| last[j % m]).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoltParams {
    pub alpha: f64,
    pub beta: f64,
}

impl Default for HoltParams {
    fn default() -> Self {
        Self { alpha: 0.3, beta: 0.1 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct HoltState {
    level: f64,
    trend: f64,
    /// Sum of squared one-step errors from time 3 onward.
    sse: f64,
}

fn holt_run(values: &[f64], p: HoltParams) -> HoltState {
    let mut level = values[0];
    let mut trend = values[1] - values[0];
    let mut sse = 0.0;
    for (t, &y) in values.iter().enumerate().skip(1) {
        let predicted = level + trend;
        if t >= 2 {
            sse += (y - predicted).powi(2);
        }
        let new_level = p.alpha * y + (1.0 - p.alpha) * predicted;
        trend = p.beta * (new_level - level) + (1.0 - p.beta) * trend;
        level = new_level;
    }
    HoltState { level, trend, sse }
}

/// Additive level + trend exponential smoothing, initialized with
/// `level = y_1`, `trend = y_2 - y_1`.
pub fn holt_linear(values: &[f64], h: usize, params: HoltParams) -> Result<Vec<f64>> {
    if values.len() < 2 {
        return Err(Error::insufficient(2, values.len()));
    }
    for (name, v) in [("alpha", params.alpha), ("beta", params.beta)] {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::Domain(format!("{name} = {v} outside (0, 1)")));
        }
    }
    let s = holt_run(values, params);
    Ok((1..=h).map(|j| s.level + j as f64 * s.trend).collect())
}

/// Grid search over `{0.1, ..., 0.9}^2` minimizing in-sample one-step MSE.
/// Ties keep the earlier grid point.
pub fn tune_holt(values: &[f64]) -> Result<HoltParams> {
    if values.len() < 2 {
        return Err(Error::insufficient(2, values.len()));
    }
    let grid: Vec<f64> = (1..=9).map(|i| f64::from(i) / 10.0).collect();
    let mut best = (f64::INFINITY, HoltParams::default());
    for &alpha in &grid {
        for &beta in &grid {
            let p = HoltParams { alpha, beta };
            let sse = holt_run(values, p).sse;
            if sse < best.0 {
                best = (sse, p);
            }
        }
    }
    Ok(best.1)
}

/// Linear autoregression on the last `p` values shared by every series.
#[derive(Debug, Clone, PartialEq)]
pub struct PooledLagModel {
    /// `coefficients[i]` multiplies lag `i + 1`.
    coefficients: Vec<f64>,
    intercept: f64,
}

impl PooledLagModel {
    pub fn new(coefficients: Vec<f64>, intercept: f64) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Domain("pooled model needs at least one lag".into()));
        }
        if !intercept.is_finite() || coefficients.iter().any(|c| !c.is_finite()) {
            return Err(Error::Fit("non-finite coefficients".into()));
        }
        Ok(Self {
            coefficients,
            intercept,
        })
    }

    pub fn lags(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn intercept(&self) -> f64 {
        self.intercept
    }

    fn predict_one(&self, recent_first: impl Iterator<Item = f64>) -> f64 {
        self.intercept
            + self
                .coefficients
                .iter()
                .zip(recent_first)
                .map(|(c, y)| c * y)
                .sum::<f64>()
    }
}

/// Least-squares fit of `y_t` on `(y_{t-1}, ..., y_{t-p}, 1)` pooling every
/// window of every series, via the normal equations with a small ridge
/// jitter on the diagonal.
pub fn fit_pooled<S: AsRef<[f64]>>(series: &[S], p: usize) -> Result<PooledLagModel> {
    if p == 0 {
        return Err(Error::Domain("lag count must be positive".into()));
    }
    let dim = p + 1;
    let mut xtx = DMatrix::<f64>::zeros(dim, dim);
    let mut xty = DVector::<f64>::zeros(dim);
    let mut windows = 0usize;
    let mut x = vec![0.0; dim];
    for s in series {
        let y = s.as_ref();
        for t in p..y.len() {
            for (i, xi) in x.iter_mut().take(p).enumerate() {
                *xi = y[t - 1 - i];
            }
            x[p] = 1.0;
            for a in 0..dim {
                xty[a] += x[a] * y[t];
                for b in a..dim {
                    xtx[(a, b)] += x[a] * x[b];
                }
            }
            windows += 1;
        }
    }
    if windows == 0 {
        return Err(Error::Fit(format!("no series longer than {p} lags")));
    }
    for a in 0..dim {
        for b in 0..a {
            xtx[(a, b)] = xtx[(b, a)];
        }
        xtx[(a, a)] += RIDGE_JITTER;
    }
    let beta = xtx
        .clone()
        .cholesky()
        .map(|c| c.solve(&xty))
        .or_else(|| xtx.lu().solve(&xty))
        .ok_or_else(|| Error::Fit("singular normal equations".into()))?;
    PooledLagModel::new(beta.iter().take(p).copied().collect(), beta[p])
}

/// Iterated multi-step forecasting: each prediction is appended to the lag
/// window before the next step.
pub fn predict_iterated(model: &PooledLagModel, values: &[f64], h: usize) -> Result<Vec<f64>> {
    let p = model.lags();
    if values.len() < p {
        return Err(Error::insufficient(p, values.len()));
    }
    let mut window: Vec<f64> = values[values.len() - p..].to_vec();
    let mut out = Vec::with_capacity(h);
    for _ in 0..h {
        let next = model.predict_one(window.iter().rev().copied());
        out.push(next);
        window.remove(0);
        window.push(next);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum BaseModel {
    SeasonalNaive,
    Holt { params: HoltParams, tune: bool },
    Pooled { lags: Option<usize>, mean_scale: bool },
}

impl BaseModel {
    pub fn holt() -> Self {
        BaseModel::Holt {
            params: HoltParams::default(),
            tune: false,
        }
    }

    pub fn pooled() -> Self {
        BaseModel::Pooled {
            lags: None,
            mean_scale: false,
        }
    }

    pub fn is_global(&self) -> bool {
        matches!(self, BaseModel::Pooled { .. })
    }

    /// Short label for result tables.
    pub fn label(&self) -> &'static str {
        match self {
            BaseModel::SeasonalNaive => "SNAIVE",
            BaseModel::Holt { .. } => "HOLT",
            BaseModel::Pooled { .. } => "PR",
        }
    }

    fn lags(&self, m: usize) -> usize {
        match self {
            BaseModel::Pooled { lags: Some(p), .. } => *p,
            _ => lag_heuristic(m),
        }
    }

    /// Minimum training length for one forecast.
    pub fn min_history(&self, m: usize) -> usize {
        match self {
            BaseModel::SeasonalNaive => m,
            BaseModel::Holt { .. } => 2,
            BaseModel::Pooled { .. } => self.lags(m) + 1,
        }
    }

    /// Forecast from a single series; the pooled model is fitted on that
    /// series alone.
    pub fn forecast_local(&self, values: &[f64], m: usize, h: usize) -> Result<Vec<f64>> {
        match self {
            BaseModel::SeasonalNaive => seasonal_naive(values, m, h),
            BaseModel::Holt { params, tune } => {
                let p = if *tune { tune_holt(values)? } else { *params };
                holt_linear(values, h, p)
            }
            BaseModel::Pooled { .. } => Ok(self.forecast_pooled(&[values], m, h)?.remove(0)),
        }
    }

    /// Fit one pooled model on all `prefixes` and forecast each of them.
    pub(crate) fn forecast_pooled(&self, prefixes: &[&[f64]], m: usize, h: usize) -> Result<Vec<Vec<f64>>> {
        let p = self.lags(m);
        let mean_scale = matches!(self, BaseModel::Pooled { mean_scale: true, .. });
        let scales: Vec<f64> = prefixes
            .iter()
            .map(|y| {
                if !mean_scale || y.is_empty() {
                    return 1.0;
                }
                let s = y.iter().map(|v| v.abs()).sum::<f64>() / y.len() as f64;
                if s > 0.0 {
                    s
                } else {
                    1.0
                }
            })
            .collect();
        let scaled: Vec<Vec<f64>> = prefixes
            .iter()
            .zip(&scales)
            .map(|(y, s)| y.iter().map(|v| v / s).collect())
            .collect();
        let model = fit_pooled(&scaled, p)?;
        scaled
            .iter()
            .zip(&scales)
            .map(|(y, s)| Ok(predict_iterated(&model, y, h)?.into_iter().map(|v| v * s).collect()))
            .collect()
    }
}

impl fmt::Display for BaseModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BaseModel::SeasonalNaive => "snaive",
            BaseModel::Holt { .. } => "holt",
            BaseModel::Pooled { .. } => "pooled",
        })
    }
}

impl FromStr for BaseModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "snaive" => Ok(BaseModel::SeasonalNaive),
            "holt" => Ok(BaseModel::holt()),
            "pooled" | "pr" => Ok(BaseModel::pooled()),
            other => Err(Error::Config(format!("unknown model {other:?}"))),
        }
    }
}

/// A series that could not be forecast, with the reason.
#[derive(Debug, Clone, PartialEq)]
pub struct Skipped {
    pub series_id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct RollingForecasts {
    pub matrices: Vec<ForecastMatrix>,
    pub skipped: Vec<Skipped>,
}

/// Origin placement for a series, checked against the model's history needs.
fn placement(series: &TimeSeries, model: &BaseModel, h: usize, origins: usize) -> std::result::Result<usize, String> {
    let t0 = first_origin_for(series.len(), h, origins).map_err(|e| e.to_string())?;
    let need = model.min_history(series.period()).max(series.period() + 1);
    if t0 < need {
        return Err(format!("first origin at {t0} but the model needs {need} observations"));
    }
    Ok(t0)
}

/// Produce rolling-origin forecasts for every series of `dataset` using the
/// series values themselves as the training data.
pub fn rolling_origin_forecasts(
    dataset: &Dataset,
    model: &BaseModel,
    h: usize,
    origins: usize,
) -> Result<RollingForecasts> {
    let inputs: Vec<(&str, &[f64])> = dataset.series().iter().map(|s| (s.id(), s.values())).collect();
    rolling_origin_on(dataset, &inputs, model, h, origins)
}

/// Shared driver: origins are placed on each series of `dataset`; the model
/// is trained on prefixes of `inputs` (same ids and lengths), which lets the
/// remainder pipeline reuse it.
pub(crate) fn rolling_origin_on(
    dataset: &Dataset,
    inputs: &[(&str, &[f64])],
    model: &BaseModel,
    h: usize,
    origins: usize,
) -> Result<RollingForecasts> {
    if h == 0 || origins == 0 {
        return Err(Error::Domain("horizon and origin count must be positive".into()));
    }
    let m = dataset.period();
    let mut skipped = Vec::new();
    let mut usable: Vec<(usize, usize)> = Vec::new(); // (input index, t0)
    for (idx, series) in dataset.series().iter().enumerate() {
        match placement(series, model, h, origins) {
            Ok(t0) => usable.push((idx, t0)),
            Err(reason) => {
                log::warn!("skipping series {}: {reason}", series.id());
                skipped.push(Skipped {
                    series_id: series.id().to_string(),
                    reason,
                });
            }
        }
    }

    let matrices = if model.is_global() {
        let mut rows: Vec<Vec<Vec<f64>>> = vec![Vec::with_capacity(origins); usable.len()];
        for k in 0..origins {
            let prefixes: Vec<&[f64]> = usable.iter().map(|&(idx, t0)| &inputs[idx].1[..t0 + k]).collect();
            if prefixes.is_empty() {
                break;
            }
            let forecasts = model.forecast_pooled(&prefixes, m, h)?;
            for (r, f) in rows.iter_mut().zip(forecasts) {
                r.push(f);
            }
        }
        usable
            .iter()
            .zip(rows)
            .map(|(&(idx, t0), r)| ForecastMatrix::new(inputs[idx].0, t0, r))
            .collect::<Result<Vec<_>>>()?
    } else {
        usable
            .par_iter()
            .map(|&(idx, t0)| {
                let (id, values) = inputs[idx];
                let rows = (0..origins)
                    .map(|k| model.forecast_local(&values[..t0 + k], m, h))
                    .collect::<Result<Vec<_>>>()?;
                ForecastMatrix::new(id, t0, rows)
            })
            .collect::<Result<Vec<_>>>()?
    };
    Ok(RollingForecasts { matrices, skipped })
}
