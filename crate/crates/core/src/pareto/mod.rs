//! Accuracy/stability trade-off analysis: non-dominated front, convex
//! smoothing, knee selection and accuracy-budget selection.

mod plot;

pub use plot::render_svg;

use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io::{format_sig6, ResultRow};

/// A variant placed in the accuracy/stability plane. Both objectives are
/// minimized.
#[derive(Debug, Clone, PartialEq)]
pub struct TradeoffPoint {
    pub label: String,
    pub accuracy: f64,
    pub stability: f64,
}

impl TradeoffPoint {
    pub fn new(label: impl Into<String>, accuracy: f64, stability: f64) -> Result<Self> {
        let label = label.into();
        if !(accuracy.is_finite() && stability.is_finite() && accuracy >= 0.0 && stability >= 0.0) {
            return Err(Error::Domain(format!(
                "point {label}: accuracy and stability must be finite and non-negative"
            )));
        }
        Ok(Self {
            label,
            accuracy,
            stability,
        })
    }

    /// `self` is no worse on both axes and better on at least one.
    pub fn dominates(&self, other: &TradeoffPoint) -> bool {
        self.accuracy <= other.accuracy
            && self.stability <= other.stability
            && (self.accuracy < other.accuracy || self.stability < other.stability)
    }

    fn same_position(&self, other: &TradeoffPoint) -> bool {
        self.accuracy == other.accuracy && self.stability == other.stability
    }
}

/// Non-dominated points sorted by increasing accuracy (and so decreasing
/// stability). Coincident points collapse onto the first label.
pub fn pareto_front(points: &[TradeoffPoint]) -> Vec<TradeoffPoint> {
    let mut front: Vec<TradeoffPoint> = Vec::new();
    for (i, p) in points.iter().enumerate() {
        let dominated = points.iter().any(|q| q.dominates(p));
        let duplicate = points[..i].iter().any(|q| q.same_position(p));
        if !dominated && !duplicate {
            front.push(p.clone());
        }
    }
    front.sort_by(|a, b| a.accuracy.total_cmp(&b.accuracy));
    front
}

fn cross(o: &TradeoffPoint, a: &TradeoffPoint, b: &TradeoffPoint) -> f64 {
    (a.accuracy - o.accuracy) * (b.stability - o.stability) - (a.stability - o.stability) * (b.accuracy - o.accuracy)
}

/// Lower-left convex hull of a front (sorted by accuracy). Collinear points
/// stay on the hull.
pub fn convex_hull(front: &[TradeoffPoint]) -> Vec<TradeoffPoint> {
    let mut hull: Vec<TradeoffPoint> = Vec::with_capacity(front.len());
    for p in front {
        while hull.len() >= 2 && cross(&hull[hull.len() - 2], &hull[hull.len() - 1], p) < 0.0 {
            hull.pop();
        }
        hull.push(p.clone());
    }
    hull
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Smoothing {
    /// Piecewise-linear lower convex hull.
    #[default]
    Hull,
    /// Convex quadratic spline fitted by least squares with `knots` interior
    /// knots.
    Spline { knots: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SmoothCurve {
    /// Hull knots (front points on the convex hull).
    pub knots: Vec<TradeoffPoint>,
    /// Sampled `(accuracy, stability)` pairs along the curve.
    pub samples: Vec<(f64, f64)>,
    spline: Option<ConvexSpline>,
}

/// Maps both axes to `[0, 1]` over the extremes of `points`.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Normalizer {
    x0: f64,
    dx: f64,
    y0: f64,
    dy: f64,
}

impl Normalizer {
    fn over(points: &[TradeoffPoint]) -> Self {
        let fold = |f: fn(&TradeoffPoint) -> f64| {
            points
                .iter()
                .map(f)
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)))
        };
        let (x0, x1) = fold(|p| p.accuracy);
        let (y0, y1) = fold(|p| p.stability);
        let span = |lo: f64, hi: f64| if hi > lo { hi - lo } else { 1.0 };
        Self {
            x0,
            dx: span(x0, x1),
            y0,
            dy: span(y0, y1),
        }
    }

    fn apply(&self, p: &TradeoffPoint) -> (f64, f64) {
        ((p.accuracy - self.x0) / self.dx, (p.stability - self.y0) / self.dy)
    }

    fn invert(&self, (x, y): (f64, f64)) -> (f64, f64) {
        (self.x0 + x * self.dx, self.y0 + y * self.dy)
    }
}

/// `f(x) = c0 + c1 x + sum_k a_k (x - tau_k)_+^2` with `a_k >= 0`, so
/// `f'' >= 0` everywhere. Defined on normalized axes.
#[derive(Debug, Clone, PartialEq)]
struct ConvexSpline {
    c0: f64,
    c1: f64,
    taus: Vec<f64>,
    a: Vec<f64>,
    norm: Normalizer,
}

impl ConvexSpline {
    fn basis(taus: &[f64], x: f64) -> Vec<f64> {
        let mut b = vec![1.0, x];
        b.extend(taus.iter().map(|t| (x - t).max(0.0).powi(2)));
        b
    }

    fn fit(points: &[(f64, f64)], knots: usize, norm: Normalizer) -> Self {
        let taus: Vec<f64> = (1..=knots).map(|k| k as f64 / (knots + 1) as f64).collect();
        let p = taus.len() + 2;
        // normal equations with a small ridge so under-determined fits stay unique
        let mut g = vec![vec![0.0; p]; p];
        let mut r = vec![0.0; p];
        for &(x, y) in points {
            let b = Self::basis(&taus, x);
            for i in 0..p {
                r[i] += b[i] * y;
                for j in 0..p {
                    g[i][j] += b[i] * b[j];
                }
            }
        }
        for (i, row) in g.iter_mut().enumerate() {
            row[i] += 1e-9;
        }
        // projected coordinate descent; the curvature terms are kept non-negative
        let mut c = vec![0.0; p];
        for _ in 0..5000 {
            let mut change: f64 = 0.0;
            for i in 0..p {
                let s: f64 = (0..p).filter(|&j| j != i).map(|j| g[i][j] * c[j]).sum();
                let mut v = (r[i] - s) / g[i][i];
                if i >= 2 {
                    v = v.max(0.0);
                }
                change = change.max((v - c[i]).abs());
                c[i] = v;
            }
            if change < 1e-14 {
                break;
            }
        }
        Self {
            c0: c[0],
            c1: c[1],
            a: c[2..].to_vec(),
            taus,
            norm,
        }
    }

    fn value(&self, x: f64) -> f64 {
        self.c0
            + self.c1 * x
            + self
                .taus
                .iter()
                .zip(&self.a)
                .map(|(t, a)| a * (x - t).max(0.0).powi(2))
                .sum::<f64>()
    }

    fn slope(&self, x: f64) -> f64 {
        self.c1
            + self
                .taus
                .iter()
                .zip(&self.a)
                .map(|(t, a)| 2.0 * a * (x - t).max(0.0))
                .sum::<f64>()
    }

    fn second(&self, x: f64) -> f64 {
        self.taus
            .iter()
            .zip(&self.a)
            .filter(|(t, _)| x > **t)
            .map(|(_, a)| 2.0 * a)
            .sum()
    }

    fn curvature(&self, x: f64) -> f64 {
        self.second(x) / (1.0 + self.slope(x).powi(2)).powf(1.5)
    }
}

const SAMPLES: usize = 101;

/// Smooths a front (sorted by accuracy) into a convex curve.
pub fn convex_smooth(front: &[TradeoffPoint], mode: Smoothing) -> SmoothCurve {
    let knots = convex_hull(front);
    if knots.len() < 2 {
        let samples = knots.iter().map(|p| (p.accuracy, p.stability)).collect();
        return SmoothCurve {
            knots,
            samples,
            spline: None,
        };
    }
    match mode {
        Smoothing::Hull => {
            let samples = knots.iter().map(|p| (p.accuracy, p.stability)).collect();
            SmoothCurve {
                knots,
                samples,
                spline: None,
            }
        }
        Smoothing::Spline { knots: n } => {
            let norm = Normalizer::over(&knots);
            let pts: Vec<(f64, f64)> = knots.iter().map(|p| norm.apply(p)).collect();
            let spline = ConvexSpline::fit(&pts, n, norm);
            let samples = (0..SAMPLES)
                .map(|i| {
                    let x = i as f64 / (SAMPLES - 1) as f64;
                    norm.invert((x, spline.value(x)))
                })
                .collect();
            SmoothCurve {
                knots,
                samples,
                spline: Some(spline),
            }
        }
    }
}

/// Curvature of the circle through three points:
/// `4 * area / (|ab| |bc| |ca|)`.
pub fn menger_curvature(a: (f64, f64), b: (f64, f64), c: (f64, f64)) -> f64 {
    let area2 = ((b.0 - a.0) * (c.1 - a.1) - (b.1 - a.1) * (c.0 - a.0)).abs();
    let d = |p: (f64, f64), q: (f64, f64)| (p.0 - q.0).hypot(p.1 - q.1);
    let denom = d(a, b) * d(b, c) * d(c, a);
    if denom == 0.0 {
        0.0
    } else {
        2.0 * area2 / denom
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Selection {
    pub point: TradeoffPoint,
    /// Curvature at the selected knot on normalized axes.
    pub curvature: Option<f64>,
    /// Fewer than three hull knots or a straight front; the most accurate
    /// point was returned.
    pub degenerate: bool,
    /// The accuracy budget decided the selection.
    pub budget_applied: bool,
    pub budget_infeasible: bool,
}

impl Selection {
    fn plain(point: TradeoffPoint, curvature: Option<f64>, degenerate: bool) -> Self {
        Self {
            point,
            curvature,
            degenerate,
            budget_applied: false,
            budget_infeasible: false,
        }
    }
}

/// Picks the knee of the smoothed front: the interior hull knot with the
/// largest curvature after scaling both axes to `[0, 1]`. Ties go to the
/// more accurate point.
pub fn select_by_curvature(front: &[TradeoffPoint], mode: Smoothing) -> Result<Selection> {
    let Some(best) = front.first() else {
        return Err(Error::Domain("empty front".into()));
    };
    let curve = convex_smooth(front, mode);
    if curve.knots.len() < 3 {
        return Ok(Selection::plain(best.clone(), None, true));
    }
    let norm = Normalizer::over(&curve.knots);
    let scored: Vec<(&TradeoffPoint, f64)> = match &curve.spline {
        None => {
            let xy: Vec<(f64, f64)> = curve.knots.iter().map(|p| norm.apply(p)).collect();
            (1..xy.len() - 1)
                .map(|i| (&curve.knots[i], menger_curvature(xy[i - 1], xy[i], xy[i + 1])))
                .collect()
        }
        Some(s) => curve.knots[1..curve.knots.len() - 1]
            .iter()
            .map(|p| (p, s.curvature(norm.apply(p).0)))
            .collect(),
    };
    let mut chosen: Option<(&TradeoffPoint, f64)> = None;
    for (p, k) in scored {
        if k > chosen.map_or(0.0, |c| c.1) {
            chosen = Some((p, k));
        }
    }
    Ok(match chosen {
        Some((p, k)) => Selection::plain(p.clone(), Some(k), false),
        None => Selection::plain(best.clone(), Some(0.0), true),
    })
}

/// Relative accuracy loss in percent of `p` against the most accurate
/// front point.
pub fn accuracy_loss(best: &TradeoffPoint, p: &TradeoffPoint) -> f64 {
    if best.accuracy == 0.0 {
        if p.accuracy == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        100.0 * (p.accuracy - best.accuracy) / best.accuracy
    }
}

/// Knee selection constrained to at most `delta_max` percent accuracy loss.
/// When the knee exceeds the budget, the least accurate front point within
/// it is returned.
pub fn select_with_budget(front: &[TradeoffPoint], delta_max: f64, mode: Smoothing) -> Result<Selection> {
    if delta_max.is_nan() {
        return Err(Error::Domain("accuracy budget must be a number".into()));
    }
    let knee = select_by_curvature(front, mode)?;
    let best = &front[0];
    if accuracy_loss(best, &knee.point) <= delta_max {
        return Ok(knee);
    }
    let within = front.iter().rev().find(|p| accuracy_loss(best, p) <= delta_max);
    Ok(match within {
        Some(p) => Selection {
            point: p.clone(),
            curvature: None,
            degenerate: knee.degenerate,
            budget_applied: true,
            budget_infeasible: false,
        },
        None => Selection {
            point: best.clone(),
            curvature: None,
            degenerate: knee.degenerate,
            budget_applied: true,
            budget_infeasible: true,
        },
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TradeoffStats {
    /// Accuracy decrease in percent relative to the most accurate point.
    pub dec_acc: Option<f64>,
    /// Stability increase in percent relative to the most accurate point.
    pub inc_stab: Option<f64>,
    pub acc_delta: f64,
    pub stab_delta: f64,
}

/// Compares `chosen` with the most accurate front point.
pub fn tradeoff_stats(front: &[TradeoffPoint], chosen: &TradeoffPoint) -> Result<TradeoffStats> {
    let best = front
        .iter()
        .min_by(|a, b| a.accuracy.total_cmp(&b.accuracy))
        .ok_or_else(|| Error::Domain("empty front".into()))?;
    let acc_delta = chosen.accuracy - best.accuracy;
    let stab_delta = best.stability - chosen.stability;
    Ok(TradeoffStats {
        dec_acc: (best.accuracy != 0.0).then(|| 100.0 * acc_delta / best.accuracy),
        inc_stab: (best.stability != 0.0).then(|| 100.0 * stab_delta / best.stability),
        acc_delta,
        stab_delta,
    })
}

/// Points of one model from a results table, labelled by variant
/// (`base`, `PI_0.4`, ...).
pub fn points_from_results(
    rows: &[ResultRow],
    model: &str,
    accuracy_metric: &str,
    stability_metric: &str,
) -> Result<Vec<TradeoffPoint>> {
    let mut labels: Vec<(String, String, f64)> = Vec::new();
    for r in rows.iter().filter(|r| r.model == model) {
        let label = if r.variant == "base" {
            "base".to_string()
        } else {
            format!("{}_{}", r.variant, crate::io::format_weight(r.weight))
        };
        if !labels.iter().any(|(l, _, _)| *l == label) {
            labels.push((label, r.variant.clone(), r.weight));
        }
    }
    if labels.is_empty() {
        return Err(Error::Format(format!("no rows for model {model}")));
    }
    let find = |variant: &str, w: f64, metric: &str| {
        rows.iter()
            .find(|r| r.model == model && r.variant == variant && r.weight == w && r.metric == metric)
            .and_then(|r| r.value)
    };
    let mut points = Vec::new();
    for (label, variant, w) in labels {
        match (find(&variant, w, accuracy_metric), find(&variant, w, stability_metric)) {
            (Some(a), Some(s)) => points.push(TradeoffPoint::new(label, a, s)?),
            _ => log::warn!("variant {label} lacks {accuracy_metric} or {stability_metric}; left out"),
        }
    }
    if points.is_empty() {
        return Err(Error::Format(format!(
            "model {model} has no defined {accuracy_metric}/{stability_metric} pairs"
        )));
    }
    Ok(points)
}

/// Everything the `pareto` command reports for one point set.
#[derive(Debug, Clone, PartialEq)]
pub struct ParetoAnalysis {
    pub points: Vec<TradeoffPoint>,
    pub front: Vec<TradeoffPoint>,
    pub curve: SmoothCurve,
    pub selection: Selection,
    pub stats: TradeoffStats,
}

pub fn analyze(points: &[TradeoffPoint], delta_max: Option<f64>, mode: Smoothing) -> Result<ParetoAnalysis> {
    let front = pareto_front(points);
    let curve = convex_smooth(&front, mode);
    let selection = match delta_max {
        Some(d) => select_with_budget(&front, d, mode)?,
        None => select_by_curvature(&front, mode)?,
    };
    let stats = tradeoff_stats(&front, &selection.point)?;
    Ok(ParetoAnalysis {
        points: points.to_vec(),
        front,
        curve,
        selection,
        stats,
    })
}

impl ParetoAnalysis {
    /// `label,accuracy,stability,front,hull,selected` for every point.
    pub fn write_csv<W: Write>(&self, out: &mut W) -> std::io::Result<()> {
        writeln!(out, "label,accuracy,stability,front,hull,selected")?;
        for p in &self.points {
            let on_front = self.front.iter().any(|q| q.label == p.label);
            let on_hull = self.curve.knots.iter().any(|q| q.label == p.label);
            writeln!(
                out,
                "{},{},{},{},{},{}",
                p.label,
                format_sig6(p.accuracy),
                format_sig6(p.stability),
                u8::from(on_front),
                u8::from(on_hull),
                u8::from(self.selection.point.label == p.label)
            )?;
        }
        Ok(())
    }

    pub fn summary(&self) -> String {
        let pct = |v: Option<f64>| v.map_or_else(|| "NA".to_string(), |v| format!("{v:.3}"));
        let mut flags = Vec::new();
        if self.selection.degenerate {
            flags.push("degenerate front");
        }
        if self.selection.budget_applied {
            flags.push("accuracy budget applied");
        }
        if self.selection.budget_infeasible {
            flags.push("budget infeasible");
        }
        format!(
            "selected {} (accuracy {}, stability {}); accuracy decrease {}%, stability increase {}%{}",
            self.selection.point.label,
            format_sig6(self.selection.point.accuracy),
            format_sig6(self.selection.point.stability),
            pct(self.stats.dec_acc),
            pct(self.stats.inc_stab),
            if flags.is_empty() {
                String::new()
            } else {
                format!(" [{}]", flags.join(", "))
            }
        )
    }

    pub fn write_files(&self, dir: &Path, stem: &str, title: &str) -> Result<()> {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        let csv = dir.join(format!("{stem}.csv"));
        let mut f = std::fs::File::create(&csv).map_err(|e| Error::io(&csv, e))?;
        self.write_csv(&mut f).map_err(|e| Error::io(&csv, e))?;
        let svg = dir.join(format!("{stem}.svg"));
        std::fs::write(&svg, render_svg(self, title)).map_err(|e| Error::io(&svg, e))
    }
}
