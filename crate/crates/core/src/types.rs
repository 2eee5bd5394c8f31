//! Domain types and the origin/horizon/target index algebra.
//!
//! Times are 1-based positions in a series: `y_1 .. y_L`. An origin at time
//! `t` has observed `y_1 .. y_t` and forecasts `y_{t+1} .. y_{t+h}`, so the
//! origin time doubles as the length of the training prefix. Origin and
//! horizon indices exposed by the API (`k`, `j`) are also 1-based.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::error::{check_weight, Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    id: String,
    values: Vec<f64>,
    period: usize,
}

impl TimeSeries {
    pub fn new(id: impl Into<String>, values: Vec<f64>, period: usize) -> Result<Self> {
        let id = id.into();
        if period == 0 {
            return Err(Error::Domain("seasonal period must be positive".into()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!(
                "series {id}: non-finite value at time {}",
                pos + 1
            )));
        }
        Ok(Self { id, values, period })
    }

    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Observations `y_1 .. y_t`.
    pub fn prefix(&self, t: usize) -> &[f64] {
        &self.values[..t.min(self.values.len())]
    }

    /// Observation at 1-based time `t`.
    pub fn at(&self, t: usize) -> Option<f64> {
        t.checked_sub(1).and_then(|i| self.values.get(i)).copied()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    frequency: String,
    period: usize,
    series: Vec<TimeSeries>,
}

impl Dataset {
    pub fn new(name: impl Into<String>, frequency: impl Into<String>, series: Vec<TimeSeries>) -> Result<Self> {
        let mut seen = HashSet::new();
        for s in &series {
            if !seen.insert(s.id()) {
                return Err(Error::Format(format!("duplicate series id {}", s.id())));
            }
        }
        let period = series.first().map_or(1, TimeSeries::period);
        if let Some(s) = series.iter().find(|s| s.period() != period) {
            return Err(Error::Format(format!(
                "series {} has period {} but the dataset uses {period}",
                s.id(),
                s.period()
            )));
        }
        Ok(Self {
            name: name.into(),
            frequency: frequency.into(),
            period,
            series,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn frequency(&self) -> &str {
        &self.frequency
    }

    pub fn period(&self) -> usize {
        self.period
    }

    pub fn series(&self) -> &[TimeSeries] {
        &self.series
    }

    pub fn get(&self, id: &str) -> Option<&TimeSeries> {
        self.series.iter().find(|s| s.id() == id)
    }

    pub fn len(&self) -> usize {
        self.series.len()
    }

    pub fn is_empty(&self) -> bool {
        self.series.is_empty()
    }
}

/// Time of origin 1 when `origins` consecutive origins with horizon `horizon`
/// are placed so that the last forecast window ends at the series end.
pub fn first_origin_for(series_len: usize, horizon: usize, origins: usize) -> Result<usize> {
    if horizon == 0 || origins == 0 {
        return Err(Error::Domain("horizon and origin count must be positive".into()));
    }
    let span = horizon + origins - 1;
    if series_len <= span {
        return Err(Error::insufficient(span + 1, series_len));
    }
    Ok(series_len - span)
}

/// Per-series grid of rolling-origin forecasts. Row `k` (1-based) is produced
/// at time `first_origin + k - 1` and holds forecasts for horizons `1..=h`.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastMatrix {
    series_id: String,
    first_origin: usize,
    rows: Vec<Vec<f64>>,
}

impl ForecastMatrix {
    /// Builds a matrix, rejecting empty or ragged grids.
    pub fn new(series_id: impl Into<String>, first_origin: usize, rows: Vec<Vec<f64>>) -> Result<Self> {
        let m = Self::from_rows_unchecked(series_id, first_origin, rows);
        if let Some(v) = m.shape_violations().into_iter().next() {
            return Err(Error::Shape(format!("series {}: {v}", m.series_id)));
        }
        Ok(m)
    }

    /// Builds a matrix without shape checks; use [`validate`] to inspect it.
    pub fn from_rows_unchecked(series_id: impl Into<String>, first_origin: usize, rows: Vec<Vec<f64>>) -> Self {
        Self {
            series_id: series_id.into(),
            first_origin,
            rows,
        }
    }

    pub fn series_id(&self) -> &str {
        &self.series_id
    }

    pub fn first_origin(&self) -> usize {
        self.first_origin
    }

    pub fn horizon(&self) -> usize {
        self.rows.first().map_or(0, Vec::len)
    }

    pub fn origins(&self) -> usize {
        self.rows.len()
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    pub fn into_rows(self) -> Vec<Vec<f64>> {
        self.rows
    }

    /// Row of origin `k` (1-based).
    pub fn row(&self, k: usize) -> Option<&[f64]> {
        k.checked_sub(1).and_then(|i| self.rows.get(i)).map(Vec::as_slice)
    }

    /// Forecast of origin `k` for horizon `j` (both 1-based).
    pub fn get(&self, k: usize, j: usize) -> Option<f64> {
        self.row(k)
            .and_then(|r| j.checked_sub(1).and_then(|jj| r.get(jj)))
            .copied()
    }

    /// Time at which origin `k` is produced (the training prefix length).
    pub fn origin_time(&self, k: usize) -> usize {
        self.first_origin + k - 1
    }

    /// Absolute time targeted by the forecast of origin `k`, horizon `j`.
    pub fn target_time(&self, k: usize, j: usize) -> Result<usize> {
        if k == 0 || k > self.origins() {
            return Err(Error::Range(format!("origin {k} not in 1..={}", self.origins())));
        }
        if j == 0 || j > self.horizon() {
            return Err(Error::Range(format!("horizon {j} not in 1..={}", self.horizon())));
        }
        Ok(self.first_origin + (k - 1) + j)
    }

    /// Earliest `(origin, horizon)` whose forecast targets `target`.
    pub fn first_forecast_for(&self, target: usize) -> Option<(usize, usize)> {
        let h = self.horizon();
        let last = self.first_origin + self.origins() - 1 + h;
        if h == 0 || target <= self.first_origin || target > last {
            return None;
        }
        // target = t0 + k - 1 + j with j <= h  =>  k >= target - t0 - h + 1
        let k = (target + 1).saturating_sub(self.first_origin + h).max(1);
        Some((k, target - self.first_origin - k + 1))
    }

    /// Same shape, new values.
    pub fn with_rows(&self, rows: Vec<Vec<f64>>) -> Self {
        Self {
            series_id: self.series_id.clone(),
            first_origin: self.first_origin,
            rows,
        }
    }

    /// Re-anchors the matrix with its last window ending at `series_len`.
    pub fn anchored_at_end(mut self, series_len: usize) -> Result<Self> {
        self.first_origin = first_origin_for(series_len, self.horizon(), self.origins())?;
        Ok(self)
    }

    fn shape_violations(&self) -> Vec<Violation> {
        let mut out = Vec::new();
        let h = self.horizon();
        if self.rows.is_empty() {
            out.push(Violation::Empty);
            return out;
        }
        if h == 0 {
            out.push(Violation::ZeroHorizon);
        }
        for (i, r) in self.rows.iter().enumerate() {
            if r.len() != h {
                out.push(Violation::RaggedRow {
                    origin: i + 1,
                    expected: h,
                    found: r.len(),
                });
            }
            if let Some(j) = r.iter().position(|v| !v.is_finite()) {
                out.push(Violation::NonFinite {
                    origin: i + 1,
                    horizon: j + 1,
                });
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Empty,
    ZeroHorizon,
    RaggedRow {
        origin: usize,
        expected: usize,
        found: usize,
    },
    NonFinite {
        origin: usize,
        horizon: usize,
    },
    SeriesMismatch {
        matrix: String,
        series: String,
    },
    OriginBeforeStart,
    ActualsMissing {
        last_target: usize,
        series_len: usize,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Empty => write!(f, "matrix has no origins"),
            Violation::ZeroHorizon => write!(f, "horizon is zero"),
            Violation::RaggedRow {
                origin,
                expected,
                found,
            } => write!(
                f,
                "ragged row: origin {origin} has {found} forecasts, expected {expected}"
            ),
            Violation::NonFinite { origin, horizon } => {
                write!(f, "non-finite forecast at origin {origin} horizon {horizon}")
            }
            Violation::SeriesMismatch { matrix, series } => {
                write!(f, "matrix for {matrix} checked against series {series}")
            }
            Violation::OriginBeforeStart => write!(f, "first origin precedes any observation"),
            Violation::ActualsMissing {
                last_target,
                series_len,
            } => write!(
                f,
                "actuals missing: last target {last_target} beyond series length {series_len}"
            ),
        }
    }
}

/// Lists every way `matrix` fails its invariants against `series`.
pub fn validate(matrix: &ForecastMatrix, series: &TimeSeries) -> Vec<Violation> {
    let mut out = matrix.shape_violations();
    if matrix.series_id() != series.id() {
        out.push(Violation::SeriesMismatch {
            matrix: matrix.series_id().to_string(),
            series: series.id().to_string(),
        });
    }
    if matrix.first_origin() == 0 {
        out.push(Violation::OriginBeforeStart);
    }
    if !matrix.rows.is_empty() {
        let last_target = matrix.first_origin() + matrix.origins() - 1 + matrix.horizon();
        if last_target > series.len() {
            out.push(Violation::ActualsMissing {
                last_target,
                series_len: series.len(),
            });
        }
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Vertical,
    Horizontal,
    JointVh,
    JointHv,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Vertical => "vertical",
            Direction::Horizontal => "horizontal",
            Direction::JointVh => "joint_vh",
            Direction::JointHv => "joint_hv",
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Direction {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "vertical" | "v" => Ok(Direction::Vertical),
            "horizontal" | "h" => Ok(Direction::Horizontal),
            "joint_vh" | "vh" => Ok(Direction::JointVh),
            "joint_hv" | "hv" => Ok(Direction::JointHv),
            other => Err(Error::Config(format!("unknown direction {other:?}"))),
        }
    }
}

/// Partial interpolation blends with the previous original forecast, full
/// interpolation with the previous stabilized one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    Partial,
    Full,
}

impl Method {
    /// Short label used in result tables (`PI` / `FI`).
    pub fn label(self) -> &'static str {
        match self {
            Method::Partial => "PI",
            Method::Full => "FI",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Partial => "partial",
            Method::Full => "full",
        })
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "partial" | "pi" => Ok(Method::Partial),
            "full" | "fi" => Ok(Method::Full),
            other => Err(Error::Config(format!("unknown method {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilizationSpec {
    pub direction: Direction,
    pub method: Method,
    pub weight: f64,
    /// Horizontal-stage weight for joint directions.
    pub secondary_weight: Option<f64>,
}

impl StabilizationSpec {
    pub fn new(direction: Direction, method: Method, weight: f64) -> Result<Self> {
        Self::with_secondary(direction, method, weight, None)
    }

    pub fn with_secondary(
        direction: Direction,
        method: Method,
        weight: f64,
        secondary_weight: Option<f64>,
    ) -> Result<Self> {
        check_weight(weight)?;
        let joint = matches!(direction, Direction::JointVh | Direction::JointHv);
        match (joint, secondary_weight) {
            (true, None) => return Err(Error::Domain("joint stabilization needs a secondary weight".into())),
            (false, Some(_)) => {
                return Err(Error::Domain(
                    "secondary weight only applies to joint stabilization".into(),
                ))
            }
            (true, Some(w2)) => check_weight(w2)?,
            (false, None) => {}
        }
        Ok(Self {
            direction,
            method,
            weight,
            secondary_weight,
        })
    }
}
