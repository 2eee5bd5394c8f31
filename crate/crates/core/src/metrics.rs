//! Scaled accuracy and stability measures.
//!
//! Every scaled measure divides by the mean in-sample error of the lag-`m`
//! seasonal naive forecast on the training prefix it is given:
//!
//! ```text
//! scale_abs = 1/(n - m) * sum_{i=m+1..n} |y_i - y_{i-m}|
//! scale_sq  = 1/(n - m) * sum_{i=m+1..n} (y_i - y_{i-m})^2
//! ```
//!
//! Accuracy and horizontal stability at origin `t` use `y_1..y_t`; vertical
//! stability at origin `t` uses `y_1..y_{t-1}`, the prefix known to both of
//! the compared origins.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::types::ForecastMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Metric {
    Mase,
    Rmsse,
    Smape,
    Smapc,
    MascV,
    RmsscV,
    MascIV,
    RmsscIV,
    MascH,
    RmsscH,
    MascIH,
    RmsscIH,
}

impl Metric {
    pub const ALL: [Metric; 12] = [
        Metric::Mase,
        Metric::Rmsse,
        Metric::Smape,
        Metric::Smapc,
        Metric::MascV,
        Metric::RmsscV,
        Metric::MascIV,
        Metric::RmsscIV,
        Metric::MascH,
        Metric::RmsscH,
        Metric::MascIH,
        Metric::RmsscIH,
    ];
    pub const ACCURACY: [Metric; 3] = [Metric::Mase, Metric::Rmsse, Metric::Smape];
    pub const VERTICAL: [Metric; 5] = [
        Metric::Smapc,
        Metric::MascV,
        Metric::RmsscV,
        Metric::MascIV,
        Metric::RmsscIV,
    ];
    pub const HORIZONTAL: [Metric; 4] = [Metric::MascH, Metric::RmsscH, Metric::MascIH, Metric::RmsscIH];

    pub fn name(self) -> &'static str {
        match self {
            Metric::Mase => "MASE",
            Metric::Rmsse => "RMSSE",
            Metric::Smape => "sMAPE",
            Metric::Smapc => "sMAPC",
            Metric::MascV => "MASC_V",
            Metric::RmsscV => "RMSSC_V",
            Metric::MascIV => "MASC_I_V",
            Metric::RmsscIV => "RMSSC_I_V",
            Metric::MascH => "MASC_H",
            Metric::RmsscH => "RMSSC_H",
            Metric::MascIH => "MASC_I_H",
            Metric::RmsscIH => "RMSSC_I_H",
        }
    }

    pub fn is_accuracy(self) -> bool {
        Self::ACCURACY.contains(&self)
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let alias = match s.to_ascii_uppercase().as_str() {
            "MASC" => Some(Metric::MascV),
            "RMSSC" => Some(Metric::RmsscV),
            "MASC_I" => Some(Metric::MascIV),
            "RMSSC_I" => Some(Metric::RmsscIV),
            _ => None,
        };
        alias
            .or_else(|| Metric::ALL.into_iter().find(|m| m.name().eq_ignore_ascii_case(s)))
            .ok_or_else(|| Error::Config(format!("unknown metric {s:?}")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Undefined {
    /// The seasonal naive scaling term of the training prefix is zero.
    ZeroScale,
    /// A single-step horizon leaves nothing to compare.
    NoOverlap,
}

impl fmt::Display for Undefined {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Undefined::ZeroScale => "zero scaling denominator",
            Undefined::NoOverlap => "no overlapping forecasts",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MetricValue {
    Defined(f64),
    Undefined(Undefined),
}

impl MetricValue {
    pub fn value(self) -> Option<f64> {
        match self {
            MetricValue::Defined(v) => Some(v),
            MetricValue::Undefined(_) => None,
        }
    }

    pub fn is_defined(self) -> bool {
        matches!(self, MetricValue::Defined(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Accuracy {
    Mase,
    Rmsse,
    Smape,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Change {
    Masc,
    Rmssc,
    Smapc,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HorizontalVariant {
    /// Consecutive horizons.
    Adjacent,
    /// Every horizon against H1.
    Initial,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Loss {
    Absolute,
    Squared,
}

impl Loss {
    fn of(self, d: f64) -> f64 {
        match self {
            Loss::Absolute => d.abs(),
            Loss::Squared => d * d,
        }
    }
}

fn naive_scale(training: &[f64], m: usize, loss: Loss) -> Result<f64> {
    if m == 0 {
        return Err(Error::Domain("seasonal period must be positive".into()));
    }
    if training.len() <= m {
        return Err(Error::insufficient(m + 1, training.len()));
    }
    let total: f64 = training.iter().zip(&training[m..]).map(|(a, b)| loss.of(b - a)).sum();
    Ok(total / (training.len() - m) as f64)
}

/// Mean loss of `pairs` divided by the training scale; square-rooted for
/// the squared loss.
fn scaled<I>(pairs: I, training: &[f64], m: usize, loss: Loss) -> Result<MetricValue>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let scale = naive_scale(training, m, loss)?;
    let (sum, n) = pairs
        .into_iter()
        .fold((0.0, 0usize), |(s, n), (a, b)| (s + loss.of(a - b), n + 1));
    if n == 0 {
        return Ok(MetricValue::Undefined(Undefined::NoOverlap));
    }
    if scale == 0.0 {
        return Ok(MetricValue::Undefined(Undefined::ZeroScale));
    }
    let ratio = sum / n as f64 / scale;
    Ok(MetricValue::Defined(match loss {
        Loss::Absolute => ratio,
        Loss::Squared => ratio.sqrt(),
    }))
}

fn symmetric_pct<I>(pairs: I) -> MetricValue
where
    I: IntoIterator<Item = (f64, f64)>,
{
    let (sum, n) = pairs.into_iter().fold((0.0, 0usize), |(s, n), (a, b)| {
        let den = a.abs() + b.abs();
        let term = if den == 0.0 { 0.0 } else { (a - b).abs() / den };
        (s + term, n + 1)
    });
    if n == 0 {
        MetricValue::Undefined(Undefined::NoOverlap)
    } else {
        MetricValue::Defined(200.0 * sum / n as f64)
    }
}

fn same_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Shape(format!("length {} vs {}", a.len(), b.len())));
    }
    if a.is_empty() {
        return Err(Error::Shape("empty forecast vector".into()));
    }
    Ok(())
}

/// Accuracy of one origin's forecasts against the actuals that followed it.
pub fn accuracy(kind: Accuracy, actuals: &[f64], forecasts: &[f64], training: &[f64], m: usize) -> Result<MetricValue> {
    same_len(actuals, forecasts)?;
    let pairs = actuals.iter().copied().zip(forecasts.iter().copied());
    match kind {
        Accuracy::Mase => scaled(pairs, training, m, Loss::Absolute),
        Accuracy::Rmsse => scaled(pairs, training, m, Loss::Squared),
        Accuracy::Smape => {
            if training.len() <= m {
                return Err(Error::insufficient(m + 1, training.len()));
            }
            Ok(symmetric_pct(pairs))
        }
    }
}

fn change(kind: Change, pairs: Vec<(f64, f64)>, training: &[f64], m: usize) -> Result<MetricValue> {
    match kind {
        Change::Masc => scaled(pairs, training, m, Loss::Absolute),
        Change::Rmssc => scaled(pairs, training, m, Loss::Squared),
        Change::Smapc => {
            if training.len() <= m {
                return Err(Error::insufficient(m + 1, training.len()));
            }
            Ok(symmetric_pct(pairs))
        }
    }
}

/// Change between consecutive origins over their `h - 1` shared targets:
/// `current[j]` is compared with `previous[j + 1]`. `training` is the
/// prefix up to the previous origin.
pub fn vertical_change(
    kind: Change,
    current: &[f64],
    previous: &[f64],
    training: &[f64],
    m: usize,
) -> Result<MetricValue> {
    same_len(current, previous)?;
    let pairs = current.iter().copied().zip(previous.iter().skip(1).copied()).collect();
    change(kind, pairs, training, m)
}

/// Like [`vertical_change`], but every forecast of origin `k` is compared
/// with the first forecast ever made for its target.
pub fn vertical_change_initial(
    kind: Change,
    matrix: &ForecastMatrix,
    k: usize,
    training: &[f64],
    m: usize,
) -> Result<MetricValue> {
    if k < 2 || k > matrix.origins() {
        return Err(Error::Range(format!("origin {k} not in 2..={}", matrix.origins())));
    }
    let h = matrix.horizon();
    let mut pairs = Vec::with_capacity(h.saturating_sub(1));
    for j in 1..h {
        let target = matrix.target_time(k, j)?;
        let (k0, j0) = matrix
            .first_forecast_for(target)
            .ok_or_else(|| Error::Range(format!("no forecast targets time {target}")))?;
        let current = matrix.get(k, j).unwrap_or(f64::NAN);
        let first = matrix.get(k0, j0).unwrap_or(f64::NAN);
        pairs.push((current, first));
    }
    change(kind, pairs, training, m)
}

/// Change across horizons of one origin's forecasts.
pub fn horizontal_change(
    kind: Change,
    row: &[f64],
    training: &[f64],
    m: usize,
    variant: HorizontalVariant,
) -> Result<MetricValue> {
    if row.is_empty() {
        return Err(Error::Shape("empty forecast vector".into()));
    }
    let pairs: Vec<(f64, f64)> = match variant {
        HorizontalVariant::Adjacent => row.windows(2).map(|w| (w[1], w[0])).collect(),
        HorizontalVariant::Initial => row[1..].iter().map(|&v| (v, row[0])).collect(),
    };
    change(kind, pairs, training, m)
}

/// One measured value for a series at an origin.
#[derive(Debug, Clone, PartialEq)]
pub struct MetricRecord {
    pub series_id: String,
    pub origin: usize,
    pub metric: Metric,
    pub value: MetricValue,
}

impl MetricRecord {
    fn new(series_id: &str, origin: usize, metric: Metric, value: MetricValue) -> Self {
        Self {
            series_id: series_id.to_string(),
            origin,
            metric,
            value,
        }
    }
}

/// MASE, RMSSE and sMAPE for every origin of `matrix` against `values`.
pub fn score_accuracy(matrix: &ForecastMatrix, values: &[f64], m: usize) -> Result<Vec<MetricRecord>> {
    let h = matrix.horizon();
    let mut out = Vec::with_capacity(matrix.origins() * 3);
    for k in 1..=matrix.origins() {
        let t = matrix.origin_time(k);
        if t + h > values.len() {
            return Err(Error::Shape(format!(
                "series {}: actuals end at {} but origin {k} targets {}",
                matrix.series_id(),
                values.len(),
                t + h
            )));
        }
        let actuals = &values[t..t + h];
        let forecasts = matrix.row(k).unwrap_or_default();
        let training = &values[..t];
        for (metric, kind) in [
            (Metric::Mase, Accuracy::Mase),
            (Metric::Rmsse, Accuracy::Rmsse),
            (Metric::Smape, Accuracy::Smape),
        ] {
            let v = accuracy(kind, actuals, forecasts, training, m)?;
            out.push(MetricRecord::new(matrix.series_id(), k, metric, v));
        }
    }
    Ok(out)
}

/// Vertical stability measures for origins `2..=O`; origin 1 has no
/// predecessor and is not scored.
pub fn score_vertical(matrix: &ForecastMatrix, values: &[f64], m: usize) -> Result<Vec<MetricRecord>> {
    let mut out = Vec::with_capacity(matrix.origins().saturating_sub(1) * 5);
    for k in 2..=matrix.origins() {
        let training = &values[..(matrix.origin_time(k) - 1).min(values.len())];
        let current = matrix.row(k).unwrap_or_default();
        let previous = matrix.row(k - 1).unwrap_or_default();
        let id = matrix.series_id();
        for (metric, kind) in [
            (Metric::Smapc, Change::Smapc),
            (Metric::MascV, Change::Masc),
            (Metric::RmsscV, Change::Rmssc),
        ] {
            let v = vertical_change(kind, current, previous, training, m)?;
            out.push(MetricRecord::new(id, k, metric, v));
        }
        for (metric, kind) in [(Metric::MascIV, Change::Masc), (Metric::RmsscIV, Change::Rmssc)] {
            let v = vertical_change_initial(kind, matrix, k, training, m)?;
            out.push(MetricRecord::new(id, k, metric, v));
        }
    }
    Ok(out)
}

/// Horizontal stability measures for every origin. `training[k - 1]` is the
/// scaling series for origin `k` (the observed prefix, or the decomposition
/// remainder when stabilizing remainders).
pub fn score_horizontal<T: AsRef<[f64]>>(
    matrix: &ForecastMatrix,
    training: &[T],
    m: usize,
) -> Result<Vec<MetricRecord>> {
    if training.len() != matrix.origins() {
        return Err(Error::Shape(format!(
            "{} training prefixes for {} origins",
            training.len(),
            matrix.origins()
        )));
    }
    let mut out = Vec::with_capacity(matrix.origins() * 4);
    for (k, tr) in (1..=matrix.origins()).zip(training) {
        let row = matrix.row(k).unwrap_or_default();
        for (metric, kind, variant) in [
            (Metric::MascH, Change::Masc, HorizontalVariant::Adjacent),
            (Metric::RmsscH, Change::Rmssc, HorizontalVariant::Adjacent),
            (Metric::MascIH, Change::Masc, HorizontalVariant::Initial),
            (Metric::RmsscIH, Change::Rmssc, HorizontalVariant::Initial),
        ] {
            let v = horizontal_change(kind, row, tr.as_ref(), m, variant)?;
            out.push(MetricRecord::new(matrix.series_id(), k, metric, v));
        }
    }
    Ok(out)
}

/// Observed prefixes `y_1..y_t` for each origin time `t` of `matrix`.
pub fn origin_prefixes<'a>(matrix: &ForecastMatrix, values: &'a [f64]) -> Vec<&'a [f64]> {
    (1..=matrix.origins())
        .map(|k| &values[..matrix.origin_time(k).min(values.len())])
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregate {
    pub mean: Option<f64>,
    pub defined: usize,
    pub undefined: usize,
}

/// Arithmetic mean over defined values, summed in input order.
pub fn aggregate<I: IntoIterator<Item = MetricValue>>(values: I) -> Aggregate {
    let mut sum = 0.0;
    let mut defined = 0;
    let mut undefined = 0;
    for v in values {
        match v {
            MetricValue::Defined(x) => {
                sum += x;
                defined += 1;
            }
            MetricValue::Undefined(_) => undefined += 1,
        }
    }
    Aggregate {
        mean: (defined > 0).then(|| sum / defined as f64),
        defined,
        undefined,
    }
}
