//! Weight sweeps over stabilization variants and significance testing.

mod wilcoxon;

pub use wilcoxon::{average_ranks, bonferroni, signed_rank, wilcoxon_signed_rank, WilcoxonResult, EXACT_LIMIT};

use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::error::{check_weight, Error, Result};
use crate::io::{format_weight, RawRow, ResultRow};
use crate::metrics::{
    aggregate, origin_prefixes, score_accuracy, score_horizontal, score_vertical, Aggregate, Metric, MetricRecord,
    MetricValue, Undefined,
};
use crate::models::{rolling_origin_forecasts, BaseModel, HoltParams, Skipped};
use crate::pipeline::{rolling_remainder_forecasts, DecomposedForecasts};
use crate::stabilize::{stabilize_horizontal_matrix, stabilize_joint, stabilize_vertical, JointOrder};
use crate::types::{validate, Dataset, Direction, ForecastMatrix, Method};

/// Default weight grid.
pub const DEFAULT_GRID: [f64; 6] = [0.2, 0.4, 0.5, 0.6, 0.8, 1.0];

/// A column of a results table: the unstabilized base forecasts, or one
/// method at one weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Variant {
    pub method: Option<Method>,
    pub weight: f64,
}

impl Variant {
    pub const BASE: Variant = Variant {
        method: None,
        weight: 0.0,
    };

    pub fn new(method: Method, weight: f64) -> Self {
        Self {
            method: Some(method),
            weight,
        }
    }

    /// `base`, `PI` or `FI`.
    pub fn label(&self) -> &'static str {
        self.method.map_or("base", Method::label)
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.method {
            None => f.write_str("base"),
            Some(m) => write!(f, "{}_{}", m.label(), format_weight(self.weight)),
        }
    }
}

impl FromStr for Variant {
    type Err = Error;

    /// Accepts `base`, `PI_0.4`, `FI_1`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("base") {
            return Ok(Variant::BASE);
        }
        let (label, w) = s
            .split_once('_')
            .ok_or_else(|| Error::Config(format!("unknown variant {s:?}")))?;
        let w: f64 = w
            .parse()
            .map_err(|_| Error::Config(format!("bad weight in variant {s:?}")))?;
        check_weight(w)?;
        Ok(Variant::new(label.parse()?, w))
    }
}

/// Where the forecasts come from.
#[derive(Debug, Clone, Copy)]
pub enum ForecastSource<'a> {
    Model(&'a BaseModel),
    /// Anchored external forecasts, one matrix per series.
    External(&'a [ForecastMatrix]),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub horizon: usize,
    pub origins: usize,
    pub grid: Vec<f64>,
    pub methods: Vec<Method>,
    pub direction: Direction,
    /// Horizontal weight of joint directions; the swept weight is used when
    /// absent.
    pub secondary_weight: Option<f64>,
    /// Holt parameters of the trend forecast in the remainder pipeline.
    pub trend_params: HoltParams,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            horizon: 6,
            origins: 13,
            grid: DEFAULT_GRID.to_vec(),
            methods: vec![Method::Partial, Method::Full],
            direction: Direction::Vertical,
            secondary_weight: None,
            trend_params: HoltParams::default(),
        }
    }
}

impl SweepConfig {
    /// Base first, then every method over the grid.
    pub fn variants(&self) -> Vec<Variant> {
        let mut out = vec![Variant::BASE];
        for &method in &self.methods {
            out.extend(self.grid.iter().map(|&w| Variant::new(method, w)));
        }
        out
    }
}

/// Metrics reported for a stabilization direction.
pub fn metrics_for(direction: Direction) -> Vec<Metric> {
    let mut out = Metric::ACCURACY.to_vec();
    match direction {
        Direction::Vertical => out.extend(Metric::VERTICAL),
        Direction::Horizontal => out.extend(Metric::HORIZONTAL),
        Direction::JointVh | Direction::JointHv => {
            out.extend(Metric::VERTICAL);
            out.extend(Metric::HORIZONTAL);
        }
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct VariantResult {
    pub variant: Variant,
    /// One entry per reported metric, in [`SweepResult::metrics`] order.
    pub aggregates: Vec<(Metric, Aggregate)>,
    /// Per-(series, origin) values in series order.
    pub raw: Vec<MetricRecord>,
}

impl VariantResult {
    fn new(variant: Variant, metrics: &[Metric], raw: Vec<MetricRecord>) -> Self {
        let aggregates = metrics
            .iter()
            .map(|&metric| {
                let values = raw.iter().filter(|r| r.metric == metric).map(|r| r.value);
                (metric, aggregate(values))
            })
            .collect();
        Self {
            variant,
            aggregates,
            raw,
        }
    }

    pub fn mean(&self, metric: Metric) -> Option<f64> {
        self.aggregates
            .iter()
            .find(|(m, _)| *m == metric)
            .and_then(|(_, a)| a.mean)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub model: String,
    pub direction: Direction,
    pub metrics: Vec<Metric>,
    pub variants: Vec<VariantResult>,
    pub skipped: Vec<Skipped>,
}

impl SweepResult {
    pub fn variant(&self, v: &Variant) -> Option<&VariantResult> {
        self.variants.iter().find(|r| r.variant == *v)
    }

    pub fn mean(&self, v: &Variant, metric: Metric) -> Option<f64> {
        self.variant(v).and_then(|r| r.mean(metric))
    }

    /// Aggregated table rows; undefined aggregates become `None`.
    pub fn result_rows(&self) -> Vec<ResultRow> {
        self.variants
            .iter()
            .flat_map(|vr| {
                vr.aggregates.iter().map(move |(metric, agg)| ResultRow {
                    model: self.model.clone(),
                    variant: vr.variant.label().to_string(),
                    weight: vr.variant.weight,
                    metric: metric.name().to_string(),
                    value: agg.mean,
                })
            })
            .collect()
    }

    pub fn raw_rows(&self) -> Vec<RawRow> {
        self.variants
            .iter()
            .flat_map(|vr| {
                vr.raw.iter().map(move |r| RawRow {
                    model: self.model.clone(),
                    variant: vr.variant.label().to_string(),
                    weight: vr.variant.weight,
                    series_id: r.series_id.clone(),
                    origin: r.origin,
                    metric: r.metric.name().to_string(),
                    value: r.value.value(),
                })
            })
            .collect()
    }

    /// Rebuilds sweeps (one per model) from raw per-origin rows. The
    /// direction is inferred from the metrics present.
    pub fn from_raw(rows: &[RawRow]) -> Result<Vec<SweepResult>> {
        let mut models: Vec<String> = Vec::new();
        let mut groups: HashMap<String, Vec<(Variant, MetricRecord)>> = HashMap::new();
        for r in rows {
            let variant = if r.variant.eq_ignore_ascii_case("base") {
                Variant::BASE
            } else {
                Variant::new(r.variant.parse()?, r.weight)
            };
            let record = MetricRecord {
                series_id: r.series_id.clone(),
                origin: r.origin,
                metric: r.metric.parse()?,
                value: r
                    .value
                    .map_or(MetricValue::Undefined(Undefined::ZeroScale), MetricValue::Defined),
            };
            if !groups.contains_key(&r.model) {
                models.push(r.model.clone());
            }
            groups.entry(r.model.clone()).or_default().push((variant, record));
        }
        Ok(models
            .into_iter()
            .map(|model| {
                let records = groups.remove(&model).unwrap_or_default();
                let has_v = records.iter().any(|(_, r)| Metric::VERTICAL.contains(&r.metric));
                let has_h = records.iter().any(|(_, r)| Metric::HORIZONTAL.contains(&r.metric));
                let direction = match (has_v, has_h) {
                    (true, true) => Direction::JointVh,
                    (false, true) => Direction::Horizontal,
                    _ => Direction::Vertical,
                };
                let metrics = metrics_for(direction);
                let mut variants: Vec<(Variant, Vec<MetricRecord>)> = Vec::new();
                for (v, r) in records {
                    match variants.iter_mut().find(|(x, _)| *x == v) {
                        Some((_, rs)) => rs.push(r),
                        None => variants.push((v, vec![r])),
                    }
                }
                SweepResult {
                    model,
                    direction,
                    variants: variants
                        .into_iter()
                        .map(|(v, raw)| VariantResult::new(v, &metrics, raw))
                        .collect(),
                    metrics,
                    skipped: Vec::new(),
                }
            })
            .collect())
    }
}

fn joint_order(direction: Direction) -> JointOrder {
    if direction == Direction::JointHv {
        JointOrder::HorizontalThenVertical
    } else {
        JointOrder::VerticalThenHorizontal
    }
}

/// Stabilizes raw forecasts for one variant of a non-remainder sweep.
pub fn stabilize_variant(matrix: &ForecastMatrix, variant: &Variant, config: &SweepConfig) -> Result<ForecastMatrix> {
    let Some(method) = variant.method else {
        return Ok(matrix.clone());
    };
    let w = variant.weight;
    match config.direction {
        Direction::Vertical => stabilize_vertical(matrix, w, method),
        Direction::Horizontal => stabilize_horizontal_matrix(matrix, w, method),
        d => stabilize_joint(matrix, w, config.secondary_weight.unwrap_or(w), joint_order(d), method),
    }
}

/// Scores a (possibly stabilized) forecast matrix against the observed
/// series for the metrics of `direction`.
pub fn score_matrix(
    matrix: &ForecastMatrix,
    values: &[f64],
    m: usize,
    direction: Direction,
) -> Result<Vec<MetricRecord>> {
    let mut out = score_accuracy(matrix, values, m)?;
    if direction != Direction::Horizontal {
        out.extend(score_vertical(matrix, values, m)?);
    }
    if direction != Direction::Vertical {
        out.extend(score_horizontal(matrix, &origin_prefixes(matrix, values), m)?);
    }
    Ok(out)
}

/// Remainder pipeline scoring: accuracy of the recomposed forecasts against
/// the series, horizontal stability of the stabilized remainders scaled by
/// the training remainders.
pub fn score_remainder_variant(
    d: &DecomposedForecasts,
    values: &[f64],
    m: usize,
    variant: &Variant,
) -> Result<Vec<MetricRecord>> {
    let (w, method) = match variant.method {
        Some(method) => (variant.weight, method),
        None => (0.0, Method::Full),
    };
    let (full, remainder) = d.stabilize(w, method)?;
    let mut out = score_accuracy(&full, values, m)?;
    out.extend(score_horizontal(&remainder, &d.remainder_history, m)?);
    Ok(out)
}

/// Per-series scoring outcome: one record list per variant.
type SeriesOutcome = (String, Result<Vec<Vec<MetricRecord>>>);

fn check_config(config: &SweepConfig) -> Result<()> {
    for &w in &config.grid {
        check_weight(w)?;
    }
    if let Some(w2) = config.secondary_weight {
        check_weight(w2)?;
    }
    if config.methods.is_empty() && !config.grid.is_empty() {
        return Err(Error::Config("no stabilization method selected".into()));
    }
    Ok(())
}

/// Runs the base forecasts and every variant of the grid, scoring each with
/// the metrics of the configured direction. Series that cannot be forecast
/// or scored are logged and skipped; output order follows the dataset.
pub fn run_sweep(dataset: &Dataset, source: ForecastSource<'_>, config: &SweepConfig) -> Result<SweepResult> {
    check_config(config)?;
    let m = dataset.period();
    let variants = config.variants();
    let metrics = metrics_for(config.direction);

    let (model, outcomes, mut skipped): (String, Vec<SeriesOutcome>, Vec<Skipped>) = match (config.direction, source) {
        (Direction::Horizontal, ForecastSource::Model(model)) => {
            let rd = rolling_remainder_forecasts(dataset, model, config.horizon, config.origins, config.trend_params)?;
            let outcomes = rd
                .series
                .par_iter()
                .map(|d| {
                    let values = dataset.get(d.series_id()).map_or(&[][..], |s| s.values());
                    let scored = variants
                        .iter()
                        .map(|v| score_remainder_variant(d, values, m, v))
                        .collect::<Result<Vec<_>>>();
                    (d.series_id().to_string(), scored)
                })
                .collect();
            (model.label().to_string(), outcomes, rd.skipped)
        }
        (_, source) => {
            let (label, matrices, skipped) = match source {
                ForecastSource::Model(model) => {
                    let rf = rolling_origin_forecasts(dataset, model, config.horizon, config.origins)?;
                    (model.label().to_string(), rf.matrices, rf.skipped)
                }
                ForecastSource::External(ms) => ("EXT".to_string(), ms.to_vec(), Vec::new()),
            };
            let outcomes = matrices
                .par_iter()
                .map(|matrix| {
                    let id = matrix.series_id().to_string();
                    let Some(series) = dataset.get(&id) else {
                        return (id, Err(Error::Format("series not in the dataset".into())));
                    };
                    if let Some(v) = validate(matrix, series).into_iter().next() {
                        return (id, Err(Error::Format(v.to_string())));
                    }
                    let scored = variants
                        .iter()
                        .map(|v| {
                            let stable = stabilize_variant(matrix, v, config)?;
                            score_matrix(&stable, series.values(), m, config.direction)
                        })
                        .collect::<Result<Vec<_>>>();
                    (id, scored)
                })
                .collect();
            (label, outcomes, skipped)
        }
    };

    let mut per_variant: Vec<Vec<MetricRecord>> = vec![Vec::new(); variants.len()];
    for (id, outcome) in outcomes {
        match outcome {
            Ok(scored) => {
                for (acc, records) in per_variant.iter_mut().zip(scored) {
                    acc.extend(records);
                }
            }
            Err(e) => {
                log::warn!("skipping series {id}: {e}");
                skipped.push(Skipped {
                    series_id: id,
                    reason: e.to_string(),
                });
            }
        }
    }
    if per_variant.first().is_none_or(Vec::is_empty) {
        return Err(Error::Format("no series could be evaluated".into()));
    }

    Ok(SweepResult {
        model,
        direction: config.direction,
        variants: variants
            .into_iter()
            .zip(per_variant)
            .map(|(v, raw)| VariantResult::new(v, &metrics, raw))
            .collect(),
        metrics,
        skipped,
    })
}

/// Mean over origins of the defined values of `metric`, one per series in
/// order of first appearance. Series without a defined value are dropped.
pub fn per_series_average(records: &[MetricRecord], metric: Metric) -> Vec<(String, f64)> {
    let mut order: Vec<&str> = Vec::new();
    let mut sums: HashMap<&str, (f64, usize)> = HashMap::new();
    for r in records.iter().filter(|r| r.metric == metric) {
        let entry = sums.entry(&r.series_id).or_insert_with(|| {
            order.push(&r.series_id);
            (0.0, 0)
        });
        if let Some(v) = r.value.value() {
            entry.0 += v;
            entry.1 += 1;
        }
    }
    order
        .into_iter()
        .filter_map(|id| {
            let (sum, n) = sums[id];
            if n == 0 {
                log::warn!("series {id} has no defined {metric} value");
                return None;
            }
            Some((id.to_string(), sum / n as f64))
        })
        .collect()
}

/// Unit of pairing for significance tests.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Pairing {
    /// Per-series averages over origins.
    #[default]
    Series,
    /// Individual (series, origin) values.
    Origin,
}

/// Paired samples `(baseline, candidate)` of `metric`.
pub fn paired_samples(
    baseline: &[MetricRecord],
    candidate: &[MetricRecord],
    metric: Metric,
    pairing: Pairing,
) -> (Vec<f64>, Vec<f64>) {
    match pairing {
        Pairing::Series => {
            let cand: HashMap<String, f64> = per_series_average(candidate, metric).into_iter().collect();
            per_series_average(baseline, metric)
                .into_iter()
                .filter_map(|(id, b)| cand.get(&id).map(|&c| (b, c)))
                .unzip()
        }
        Pairing::Origin => {
            let cand: HashMap<(&str, usize), f64> = candidate
                .iter()
                .filter(|r| r.metric == metric)
                .filter_map(|r| Some(((r.series_id.as_str(), r.origin), r.value.value()?)))
                .collect();
            baseline
                .iter()
                .filter(|r| r.metric == metric)
                .filter_map(|r| {
                    let b = r.value.value()?;
                    let c = cand.get(&(r.series_id.as_str(), r.origin))?;
                    Some((b, *c))
                })
                .unzip()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Significance {
    pub candidate: Variant,
    pub metric: Metric,
    /// Number of pairs before dropping ties.
    pub pairs: usize,
    /// `None` when every pair is tied.
    pub p_value: Option<f64>,
    /// Candidate mean below the baseline mean (lower is better for every
    /// metric).
    pub improved: bool,
    pub significant: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SignificanceReport {
    pub model: String,
    pub baseline: Variant,
    pub alpha: f64,
    pub comparisons: usize,
    pub corrected_alpha: f64,
    pub entries: Vec<Significance>,
}

/// Wilcoxon tests of each candidate against the baseline for every metric
/// of the sweep, at the Bonferroni-corrected level `alpha / comparisons`.
pub fn significance_report(
    sweep: &SweepResult,
    baseline: &Variant,
    candidates: &[Variant],
    alpha: f64,
    comparisons: usize,
    pairing: Pairing,
) -> Result<SignificanceReport> {
    let corrected_alpha = bonferroni(alpha, comparisons)?;
    let base = sweep
        .variant(baseline)
        .ok_or_else(|| Error::Config(format!("variant {baseline} not in the sweep")))?;
    let mut entries = Vec::new();
    for cand in candidates {
        let cr = sweep
            .variant(cand)
            .ok_or_else(|| Error::Config(format!("variant {cand} not in the sweep")))?;
        for &metric in &sweep.metrics {
            let (b, c) = paired_samples(&base.raw, &cr.raw, metric, pairing);
            let test = wilcoxon_signed_rank(&c, &b)?;
            let p_value = test.map(|t| t.p_value);
            let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len().max(1) as f64;
            let improved = !b.is_empty() && mean(&c) < mean(&b);
            entries.push(Significance {
                candidate: *cand,
                metric,
                pairs: b.len(),
                p_value,
                improved,
                significant: p_value.is_some_and(|p| p < corrected_alpha),
            });
        }
    }
    Ok(SignificanceReport {
        model: sweep.model.clone(),
        baseline: *baseline,
        alpha,
        comparisons,
        corrected_alpha,
        entries,
    })
}

impl fmt::Display for SignificanceReport {
    /// Plain-text summary; `*` marks a significant improvement over the
    /// baseline.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "model: {}", self.model)?;
        writeln!(f, "baseline: {}", self.baseline)?;
        writeln!(
            f,
            "alpha: {} / {} comparisons = {:.9}",
            self.alpha, self.comparisons, self.corrected_alpha
        )?;
        writeln!(
            f,
            "{:<10} {:<10} {:>7} {:>12}  mark",
            "variant", "metric", "pairs", "p_value"
        )?;
        for e in &self.entries {
            let p = e.p_value.map_or_else(|| "NA".to_string(), crate::io::format_sig6);
            let mark = match (e.significant, e.improved) {
                (true, true) => "*",
                (true, false) => "(worse)",
                _ => "",
            };
            writeln!(
                f,
                "{:<10} {:<10} {:>7} {:>12}  {mark}",
                e.candidate.to_string(),
                e.metric.name(),
                e.pairs,
                p
            )?;
        }
        Ok(())
    }
}
