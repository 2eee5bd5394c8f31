//! Horizontal stabilization of decomposition remainders.
//!
//! The series is decomposed at each origin; trend and season are forecast
//! directly and only the remainder forecast is stabilized, so the
//! stabilization flattens noise instead of the seasonal pattern.

use rayon::prelude::*;

use crate::decomposition::{decompose, forecast_components, recompose};
use crate::error::{Error, Result};
use crate::models::{BaseModel, HoltParams, Skipped};
use crate::stabilize::stabilize_horizontal;
use crate::types::{first_origin_for, Dataset, ForecastMatrix, Method};

#[derive(Debug, Clone, PartialEq)]
pub struct RemainderForecast {
    /// Recomposed forecast: components + stabilized remainder.
    pub forecast: Vec<f64>,
    pub components: Vec<f64>,
    pub remainder: Vec<f64>,
    pub stabilized_remainder: Vec<f64>,
    /// Remainder of the training decomposition; scales remainder stability.
    pub remainder_history: Vec<f64>,
}

/// Decompose, forecast the remainder with `model`, stabilize it
/// horizontally, and add the component forecast back.
pub fn stabilize_horizontal_on_remainder(
    values: &[f64],
    m: usize,
    model: &BaseModel,
    h: usize,
    w: f64,
    method: Method,
    trend_params: HoltParams,
) -> Result<RemainderForecast> {
    let d = decompose(values, m)?;
    let components = forecast_components(&d, h, trend_params)?;
    let remainder = model.forecast_local(&d.remainder, m, h)?;
    finish(d.remainder, components, remainder, w, method)
}

fn finish(
    history: Vec<f64>,
    components: Vec<f64>,
    remainder: Vec<f64>,
    w: f64,
    method: Method,
) -> Result<RemainderForecast> {
    let stabilized_remainder = stabilize_horizontal(&remainder, w, method)?;
    let forecast = recompose(&stabilized_remainder, &components)?;
    Ok(RemainderForecast {
        forecast,
        components,
        remainder,
        stabilized_remainder,
        remainder_history: history,
    })
}

/// Rolling-origin decomposed forecasts of one series, before stabilization.
#[derive(Debug, Clone, PartialEq)]
pub struct DecomposedForecasts {
    pub components: ForecastMatrix,
    pub remainder: ForecastMatrix,
    /// `remainder_history[k - 1]` is the training remainder at origin `k`.
    pub remainder_history: Vec<Vec<f64>>,
}

impl DecomposedForecasts {
    pub fn series_id(&self) -> &str {
        self.remainder.series_id()
    }

    /// Stabilizes the remainder forecasts horizontally and recomposes.
    /// Returns `(full forecasts, stabilized remainder forecasts)`.
    pub fn stabilize(&self, w: f64, method: Method) -> Result<(ForecastMatrix, ForecastMatrix)> {
        let mut full = Vec::with_capacity(self.remainder.origins());
        let mut stable = Vec::with_capacity(self.remainder.origins());
        for (r, c) in self.remainder.rows().iter().zip(self.components.rows()) {
            let s = stabilize_horizontal(r, w, method)?;
            full.push(recompose(&s, c)?);
            stable.push(s);
        }
        Ok((self.components.with_rows(full), self.remainder.with_rows(stable)))
    }
}

#[derive(Debug, Clone, Default)]
pub struct RollingDecomposed {
    pub series: Vec<DecomposedForecasts>,
    pub skipped: Vec<Skipped>,
}

/// Rolling-origin version of the remainder pipeline. The decomposition is
/// refit at every origin; a global model is refit per origin on the
/// remainders of all series.
pub fn rolling_remainder_forecasts(
    dataset: &Dataset,
    model: &BaseModel,
    h: usize,
    origins: usize,
    trend_params: HoltParams,
) -> Result<RollingDecomposed> {
    if h == 0 || origins == 0 {
        return Err(Error::Domain("horizon and origin count must be positive".into()));
    }
    let m = dataset.period();
    let need = (2 * m + 1).max(model.min_history(m)).max(m + 1);
    let mut skipped = Vec::new();
    let mut usable = Vec::new();
    for s in dataset.series() {
        match first_origin_for(s.len(), h, origins) {
            Ok(t0) if t0 >= need => usable.push((s, t0)),
            Ok(t0) => skipped.push(Skipped {
                series_id: s.id().to_string(),
                reason: format!("first origin at {t0} but decomposition needs {need} observations"),
            }),
            Err(e) => skipped.push(Skipped {
                series_id: s.id().to_string(),
                reason: e.to_string(),
            }),
        }
    }
    for s in &skipped {
        log::warn!("skipping series {}: {}", s.series_id, s.reason);
    }

    // decomps[series][origin]
    let decomps: Vec<Vec<(Vec<f64>, Vec<f64>)>> = usable
        .par_iter()
        .map(|(s, t0)| {
            (0..origins)
                .map(|k| {
                    let d = decompose(s.prefix(t0 + k), m)?;
                    let comp = forecast_components(&d, h, trend_params)?;
                    Ok((comp, d.remainder))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let remainder_rows: Vec<Vec<Vec<f64>>> = if model.is_global() {
        let mut rows = vec![Vec::with_capacity(origins); usable.len()];
        for k in 0..origins {
            let prefixes: Vec<&[f64]> = decomps.iter().map(|d| d[k].1.as_slice()).collect();
            if prefixes.is_empty() {
                break;
            }
            for (r, f) in rows.iter_mut().zip(model.forecast_pooled(&prefixes, m, h)?) {
                r.push(f);
            }
        }
        rows
    } else {
        decomps
            .par_iter()
            .map(|d| {
                d.iter()
                    .map(|(_, rem)| model.forecast_local(rem, m, h))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?
    };

    let series = usable
        .iter()
        .zip(decomps)
        .zip(remainder_rows)
        .map(|(((s, t0), d), rem)| {
            let (comps, hist): (Vec<_>, Vec<_>) = d.into_iter().unzip();
            Ok(DecomposedForecasts {
                components: ForecastMatrix::new(s.id(), *t0, comps)?,
                remainder: ForecastMatrix::new(s.id(), *t0, rem)?,
                remainder_history: hist,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(RollingDecomposed { series, skipped })
}
