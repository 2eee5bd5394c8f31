//! Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any
//! failure.

use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use stabcast::decomposition::decompose;
use stabcast::evaluation::{bonferroni, run_sweep, signed_rank, ForecastSource, SweepConfig, Variant};
use stabcast::io::read_long_csv;
use stabcast::metrics::{origin_prefixes, score_accuracy, score_horizontal, score_vertical, Metric, MetricRecord};
use stabcast::models::{lag_heuristic, rolling_origin_forecasts, BaseModel, HoltParams};
use stabcast::pareto::{analyze, Smoothing, TradeoffPoint};
use stabcast::pipeline::rolling_remainder_forecasts;
use stabcast::stabilize::{
    stabilize_horizontal, stabilize_horizontal_matrix, stabilize_joint, stabilize_vertical, JointOrder,
};
use stabcast::synthetic::{generate, SyntheticSpec};
use stabcast::types::first_origin_for;
use stabcast::{Dataset, Direction, ForecastMatrix, Method};

mod common;
use common::{
    horizontal_oracle, horizontal_pairs, initial_pairs, scaled, smape, vertical_oracle, vertical_pairs,
    wilcoxon_enumerated,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, msg: impl Into<String>) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg.into())
    }
}

fn within(elapsed: Duration, limit: Duration) -> Result<(), String> {
    check(elapsed < limit, format!("took {elapsed:.2?}, limit {limit:?}"))
}

fn fixture() -> Dataset {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/fixture.csv");
    read_long_csv(path, 12).unwrap().dataset
}

fn random_rows(rng: &mut ChaCha8Rng, max_o: usize, max_h: usize) -> Vec<Vec<f64>> {
    let o = rng.random_range(1..=max_o);
    let h = rng.random_range(1..=max_h);
    (0..o)
        .map(|_| (0..h).map(|_| rng.random_range(-1000.0..1000.0)).collect())
        .collect()
}

fn fm(rows: Vec<Vec<f64>>) -> ForecastMatrix {
    ForecastMatrix::new("s", 10, rows).unwrap()
}

fn same_bits(a: &[Vec<f64>], b: &[Vec<f64>]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(x, y)| x.len() == y.len() && x.iter().zip(y).all(|(p, q)| p.to_bits() == q.to_bits()))
}

fn max_abs(records: &[MetricRecord], metrics: &[Metric]) -> f64 {
    records
        .iter()
        .filter(|r| metrics.contains(&r.metric))
        .filter_map(|r| r.value.value())
        .fold(0.0, |m, v| m.max(v.abs()))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let ds = fixture();
    let m = ds.period();
    let matrices = rolling_origin_forecasts(&ds, &BaseModel::pooled(), 6, 13)
        .map_err(|e| e.to_string())?
        .matrices;
    let vertical = [Metric::MascV, Metric::RmsscV, Metric::MascIV, Metric::RmsscIV];
    let horizontal = [Metric::MascH, Metric::RmsscH];
    let (mut worst_v, mut worst_h, mut scored) = (0.0f64, 0.0f64, 0usize);
    for matrix in &matrices {
        let values = ds.get(matrix.series_id()).unwrap().values();
        let v = stabilize_vertical(matrix, 1.0, Method::Full).unwrap();
        let rv = score_vertical(&v, values, m).unwrap();
        scored += rv.iter().filter(|r| r.value.is_defined()).count();
        worst_v = worst_v.max(max_abs(&rv, &vertical));
        let h = stabilize_horizontal_matrix(matrix, 1.0, Method::Full).unwrap();
        let rh = score_horizontal(&h, &origin_prefixes(&h, values), m).unwrap();
        worst_h = worst_h.max(max_abs(&rh, &horizontal));
    }
    // and through the remainder pipeline
    let config = SweepConfig {
        grid: vec![1.0],
        methods: vec![Method::Full],
        direction: Direction::Horizontal,
        ..SweepConfig::default()
    };
    let sweep = run_sweep(&ds, ForecastSource::Model(&BaseModel::pooled()), &config).map_err(|e| e.to_string())?;
    let fi1 = sweep.variant(&Variant::new(Method::Full, 1.0)).unwrap();
    worst_h = worst_h.max(max_abs(&fi1.raw, &horizontal));
    let elapsed = start.elapsed();
    check(scored > 0, "no vertical values scored")?;
    check(worst_v <= 1e-12, format!("vertical max {worst_v:e}"))?;
    check(worst_h <= 1e-12, format!("horizontal max {worst_h:e}"))?;
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "{} series, max |vertical| {worst_v:e}, max |horizontal| {worst_h:e}, {elapsed:.2?}",
        matrices.len()
    ))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    for case in 0..1000 {
        let rows = random_rows(&mut rng, 6, 8);
        let m = fm(rows.clone());
        for method in [Method::Partial, Method::Full] {
            let outs = [
                stabilize_vertical(&m, 0.0, method).unwrap(),
                stabilize_horizontal_matrix(&m, 0.0, method).unwrap(),
                stabilize_joint(&m, 0.0, 0.0, JointOrder::VerticalThenHorizontal, method).unwrap(),
                stabilize_joint(&m, 0.0, 0.0, JointOrder::HorizontalThenVertical, method).unwrap(),
            ];
            for out in &outs {
                check(
                    same_bits(out.rows(), &rows),
                    format!("case {case} {method} changed values"),
                )?;
            }
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(5))?;
    Ok(format!("1000 matrices x 4 operations x 2 methods, {elapsed:.2?}"))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for case in 0..1000 {
        let rows = random_rows(&mut rng, 6, 8);
        let w = rng.random_range(0.0..=1.0);
        for method in [Method::Partial, Method::Full] {
            let v = stabilize_vertical(&fm(rows.clone()), w, method).unwrap();
            check(
                same_bits(v.rows(), &vertical_oracle(&rows, w, method)),
                format!("vertical case {case}"),
            )?;
            let h: Vec<Vec<f64>> = rows
                .iter()
                .map(|r| stabilize_horizontal(r, w, method).unwrap())
                .collect();
            let ho: Vec<Vec<f64>> = rows.iter().map(|r| horizontal_oracle(r, w, method)).collect();
            check(same_bits(&h, &ho), format!("horizontal case {case}"))?;
        }
    }
    let p = stabilize_vertical(
        &fm(vec![vec![10.0, 12.0, 14.0], vec![11.0, 13.0, 15.0]]),
        0.5,
        Method::Partial,
    )
    .unwrap();
    check(p.rows()[1] == [11.5, 13.5, 15.0], "vertical two-origin fixture")?;
    let rows = vec![vec![0.0, 4.0, 8.0], vec![2.0, 6.0, 10.0], vec![3.0, 9.0, 12.0]];
    let p = stabilize_vertical(&fm(rows.clone()), 0.5, Method::Partial).unwrap();
    let f = stabilize_vertical(&fm(rows), 0.5, Method::Full).unwrap();
    check(p.rows()[2] == [4.5, 9.5, 12.0], "O=3/h=3 partial fixture")?;
    check(
        f.rows()[1] == [3.0, 7.0, 10.0] && f.rows()[2] == [5.0, 9.5, 12.0],
        "O=3/h=3 full fixture",
    )?;
    let row = [10.0, 20.0, 30.0];
    check(
        stabilize_horizontal(&row, 0.5, Method::Partial).unwrap() == [10.0, 15.0, 25.0],
        "[10,20,30] partial",
    )?;
    check(
        stabilize_horizontal(&row, 0.5, Method::Full).unwrap() == [10.0, 15.0, 22.5],
        "[10,20,30] full",
    )?;
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!(
        "1000 random matrices bit-exact, hand fixtures exact, {elapsed:.2?}"
    ))
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * (1.0 + a.abs().max(b.abs()))
}

fn lookup(records: &[MetricRecord], k: usize, metric: Metric) -> Option<f64> {
    records
        .iter()
        .find(|r| r.origin == k && r.metric == metric)
        .and_then(|r| r.value.value())
}

fn all_metrics(matrix: &ForecastMatrix, values: &[f64], m: usize) -> Vec<MetricRecord> {
    let mut out = score_accuracy(matrix, values, m).unwrap();
    out.extend(score_vertical(matrix, values, m).unwrap());
    out.extend(score_horizontal(matrix, &origin_prefixes(matrix, values), m).unwrap());
    out
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut compared = 0usize;
    let mut worst_scale = 0.0f64;
    for case in 0..500 {
        let m = rng.random_range(1..=4);
        let rows = random_rows(&mut rng, 6, 6);
        let (o, h) = (rows.len(), rows[0].len());
        let n = m + h + o + rng.random_range(2..=10);
        let values: Vec<f64> = (0..n).map(|_| rng.random_range(-100.0..100.0)).collect();
        let t0 = first_origin_for(n, h, o).unwrap();
        let matrix = ForecastMatrix::new("s", t0, rows.clone()).unwrap();
        let got = all_metrics(&matrix, &values, m);
        for k in 1..=o {
            let i = k - 1;
            let t = t0 + i;
            let acc: Vec<(f64, f64)> = (0..h).map(|j| (values[t + j], rows[i][j])).collect();
            let mut expect = vec![
                (Metric::Mase, scaled(&acc, &values[..t], m, false)),
                (Metric::Rmsse, scaled(&acc, &values[..t], m, true)),
                (Metric::Smape, smape(&acc)),
            ];
            if h > 1 {
                let adj = horizontal_pairs(&rows[i], false);
                let ini = horizontal_pairs(&rows[i], true);
                expect.push((Metric::MascH, scaled(&adj, &values[..t], m, false)));
                expect.push((Metric::RmsscH, scaled(&adj, &values[..t], m, true)));
                expect.push((Metric::MascIH, scaled(&ini, &values[..t], m, false)));
                expect.push((Metric::RmsscIH, scaled(&ini, &values[..t], m, true)));
                if k > 1 {
                    let tr = &values[..t - 1];
                    let v = vertical_pairs(&rows, i);
                    let iv = initial_pairs(&rows, i);
                    expect.push((Metric::MascV, scaled(&v, tr, m, false)));
                    expect.push((Metric::RmsscV, scaled(&v, tr, m, true)));
                    expect.push((Metric::MascIV, scaled(&iv, tr, m, false)));
                    expect.push((Metric::RmsscIV, scaled(&iv, tr, m, true)));
                }
            }
            for (metric, want) in expect {
                let g = lookup(&got, k, metric).ok_or(format!("case {case}: {metric} undefined at origin {k}"))?;
                check(
                    close(g, want),
                    format!("case {case}: {metric} origin {k}: {g} vs {want}"),
                )?;
                compared += 1;
            }
        }
        for a in [1e-3, 1.0, 1e3] {
            let sv: Vec<f64> = values.iter().map(|v| v * a).collect();
            let sr: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|v| v * a).collect()).collect();
            let other = all_metrics(&ForecastMatrix::new("s", t0, sr).unwrap(), &sv, m);
            for (x, y) in got.iter().zip(&other) {
                if let (Some(p), Some(q)) = (x.value.value(), y.value.value()) {
                    let rel = (p - q).abs() / p.abs().max(q.abs()).max(f64::MIN_POSITIVE);
                    if p != q {
                        worst_scale = worst_scale.max(rel);
                    }
                    check(
                        rel <= 1e-9 || (p - q).abs() <= 1e-12,
                        format!("case {case}: scale {a} {} {p} vs {q}", x.metric),
                    )?;
                }
            }
        }
    }
    Ok(format!(
        "{compared} values within 1e-9 of flat oracles, worst scale drift {worst_scale:e}"
    ))
}

fn m4_nbeats() -> Vec<TradeoffPoint> {
    [
        ("base", 0.638, 0.307),
        ("stable", 0.648, 0.253),
        ("PI_0.2", 0.635, 0.276),
        ("PI_0.4", 0.638, 0.224),
        ("PI_0.5", 0.643, 0.210),
        ("PI_0.6", 0.649, 0.206),
        ("PI_0.8", 0.665, 0.220),
        ("PI_1", 0.687, 0.255),
        ("FI_0.2", 0.634, 0.275),
        ("FI_0.4", 0.637, 0.210),
        ("FI_0.5", 0.642, 0.178),
        ("FI_0.6", 0.651, 0.147),
        ("FI_0.8", 0.683, 0.082),
        ("FI_1", 0.753, 0.0),
    ]
    .iter()
    .map(|&(l, a, s)| TradeoffPoint::new(l, a, s).unwrap())
    .collect()
}

fn m3_ets() -> Vec<TradeoffPoint> {
    [
        ("base", 0.616, 0.209),
        ("PI_0.2", 0.617, 0.171),
        ("PI_0.4", 0.621, 0.145),
        ("PI_0.5", 0.624, 0.138),
        ("PI_0.6", 0.628, 0.136),
        ("PI_0.8", 0.638, 0.143),
        ("PI_1", 0.651, 0.158),
        ("FI_0.2", 0.617, 0.170),
        ("FI_0.4", 0.621, 0.133),
        ("FI_0.5", 0.625, 0.116),
        ("FI_0.6", 0.631, 0.097),
        ("FI_0.8", 0.652, 0.056),
        ("FI_1", 0.700, 0.0),
    ]
    .iter()
    .map(|&(l, a, s)| TradeoffPoint::new(l, a, s).unwrap())
    .collect()
}

/// Runs the `pareto` command on a points file and returns the selected label.
fn cli_selection(points: &[TradeoffPoint], dir: &Path, name: &str) -> Result<String, String> {
    let input = dir.join(format!("{name}.csv"));
    let mut text = String::from("label,accuracy,stability\n");
    for p in points {
        text.push_str(&format!("{},{},{}\n", p.label, p.accuracy, p.stability));
    }
    std::fs::write(&input, text).map_err(|e| e.to_string())?;
    let out = Command::new(env!("CARGO_BIN_EXE_stabcast"))
        .args(["pareto", "--points"])
        .arg(&input)
        .arg("--output")
        .arg(dir)
        .output()
        .map_err(|e| e.to_string())?;
    check(out.status.success(), String::from_utf8_lossy(&out.stderr).into_owned())?;
    let stdout = String::from_utf8_lossy(&out.stdout);
    stdout
        .split_whitespace()
        .skip_while(|w| *w != "selected")
        .nth(1)
        .map(str::to_string)
        .ok_or_else(|| format!("no selection in output: {stdout}"))
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let dir = std::env::temp_dir().join(format!("stabcast-acceptance-{}", std::process::id()));
    std::fs::create_dir_all(&dir).map_err(|e| e.to_string())?;

    let m4 = analyze(&m4_nbeats(), None, Smoothing::Hull).map_err(|e| e.to_string())?;
    let m4_label = m4.selection.point.label.clone();
    check(
        ["FI_0.4", "FI_0.5", "FI_0.6"].contains(&m4_label.as_str()),
        format!("M4 selected {m4_label}"),
    )?;
    let (dec, inc) = (m4.stats.dec_acc.unwrap(), m4.stats.inc_stab.unwrap());
    check((dec - 1.265).abs() <= 0.15, format!("M4 dec_acc {dec:.3}"))?;
    check((inc - 35.198).abs() <= 1.5, format!("M4 inc_stab {inc:.3}"))?;
    let cli = cli_selection(&m4_nbeats(), &dir, "m4")?;
    check(cli == m4_label, format!("CLI selected {cli}, library {m4_label}"))?;

    let m3 = analyze(&m3_ets(), None, Smoothing::Hull).map_err(|e| e.to_string())?;
    let m3_label = m3.selection.point.label.clone();
    check(
        ["FI_0.2", "FI_0.4", "FI_0.5"].contains(&m3_label.as_str()),
        format!("M3 selected {m3_label}"),
    )?;
    let dec3 = m3.stats.dec_acc.unwrap();
    check((dec3 - 0.695).abs() <= 0.15, format!("M3 dec_acc {dec3:.3}"))?;
    let cli = cli_selection(&m3_ets(), &dir, "m3")?;
    check(cli == m3_label, format!("CLI selected {cli}, library {m3_label}"))?;
    let _ = std::fs::remove_dir_all(&dir);

    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(1))?;
    Ok(format!(
        "M4 {m4_label} dec_acc {dec:.3}% inc_stab {inc:.3}%; M3 {m3_label} dec_acc {dec3:.3}%; {elapsed:.2?}"
    ))
}

fn criterion_6() -> Outcome {
    let v = bonferroni(0.05, 102).map_err(|e| e.to_string())?;
    let s = format!("{v:.9}");
    check(s == "0.000490196", format!("got {s}"))?;
    Ok(s)
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut tested = 0;
    for case in 0..200 {
        let n = rng.random_range(1..=12);
        let d: Vec<f64> = (0..n).map(|_| f64::from(rng.random_range(-5i32..=5))).collect();
        let got = signed_rank(&d);
        match (got, wilcoxon_enumerated(&d)) {
            (None, None) => {}
            (Some(r), Some(p)) => {
                check(r.exact, format!("case {case}: not exact"))?;
                check(
                    (r.p_value - p).abs() <= 1e-12,
                    format!("case {case}: {} vs {p}", r.p_value),
                )?;
                let neg: Vec<f64> = d.iter().map(|v| -v).collect();
                let flipped = signed_rank(&neg).unwrap();
                check(
                    flipped.p_value == r.p_value,
                    format!("case {case}: sign flip changed p"),
                )?;
                tested += 1;
            }
            _ => return Err(format!("case {case}: defined/undefined mismatch")),
        }
    }
    let elapsed = start.elapsed();
    within(elapsed, Duration::from_secs(10))?;
    Ok(format!(
        "{tested} patterns match enumeration, sign-symmetric, {elapsed:.2?}"
    ))
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let ds = generate(&SyntheticSpec {
        series: 200,
        length: 120,
        period: 12,
        noise: 0.05,
        seed: 2024,
    })
    .map_err(|e| e.to_string())?;
    let config = SweepConfig::default();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(1)
        .build()
        .map_err(|e| e.to_string())?;
    let sweep = pool
        .install(|| run_sweep(&ds, ForecastSource::Model(&BaseModel::pooled()), &config))
        .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let masc: Vec<f64> = [0.2, 0.4, 0.6, 0.8, 1.0]
        .iter()
        .map(|&w| sweep.mean(&Variant::new(Method::Full, w), Metric::MascV).unwrap())
        .collect();
    check(
        masc.windows(2).all(|w| w[1] < w[0]),
        format!("FI MASC not decreasing: {masc:?}"),
    )?;
    let base = sweep.mean(&Variant::BASE, Metric::Mase).unwrap();
    let fi02 = sweep.mean(&Variant::new(Method::Full, 0.2), Metric::Mase).unwrap();
    let rel = 100.0 * (fi02 - base).abs() / base;
    check(
        rel <= 2.0,
        format!("MASE(FI_0.2) {fi02:.4} vs base {base:.4} ({rel:.2}%)"),
    )?;
    within(elapsed, Duration::from_secs(60))?;
    let shown: Vec<String> = masc.iter().map(|v| format!("{v:.4}")).collect();
    Ok(format!(
        "FI MASC {}; MASE base {base:.4}, FI_0.2 {fi02:.4} ({rel:.2}%); {elapsed:.2?}",
        shown.join(" > ")
    ))
}

fn criterion_9() -> Outcome {
    let (a, b) = (lag_heuristic(7), lag_heuristic(12));
    check(a == 9 && b == 15, format!("got {a} and {b}"))?;
    Ok(format!("lag_heuristic(7) = {a}, lag_heuristic(12) = {b}"))
}

fn criterion_10() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let (mut worst_add, mut worst_centre) = (0.0f64, 0.0f64);
    for _ in 0..100 {
        let m = rng.random_range(2..=12);
        let n = rng.random_range(2 * m + 1..=8 * m + 10);
        let level = rng.random_range(-100.0..100.0);
        let y: Vec<f64> = (0..n)
            .map(|t| level + 0.3 * t as f64 + 5.0 * (t as f64 * 0.7).sin() + rng.random_range(-10.0..10.0))
            .collect();
        let d = decompose(&y, m).map_err(|e| e.to_string())?;
        for (t, v) in y.iter().enumerate() {
            worst_add = worst_add.max((d.trend[t] + d.seasonal[t] + d.remainder[t] - v).abs());
        }
        worst_centre = worst_centre.max(d.seasonal_indices().iter().sum::<f64>().abs());
    }
    check(worst_add <= 1e-9, format!("additivity error {worst_add:e}"))?;
    check(worst_centre <= 1e-9, format!("seasonal sum {worst_centre:e}"))?;

    // remainder pipeline: accuracy on recomposed forecasts, stability on remainders
    let ds = fixture();
    let m = ds.period();
    let model = BaseModel::pooled();
    let config = SweepConfig {
        grid: vec![0.5],
        methods: vec![Method::Full],
        direction: Direction::Horizontal,
        ..SweepConfig::default()
    };
    let sweep = run_sweep(&ds, ForecastSource::Model(&model), &config).map_err(|e| e.to_string())?;
    let raw = &sweep.variant(&Variant::new(Method::Full, 0.5)).unwrap().raw;
    let rd = rolling_remainder_forecasts(&ds, &model, config.horizon, config.origins, HoltParams::default())
        .map_err(|e| e.to_string())?;
    let mut differs = false;
    for d in &rd.series {
        let values = ds.get(d.series_id()).unwrap().values();
        let (full, remainder) = d.stabilize(0.5, Method::Full).map_err(|e| e.to_string())?;
        let mut expected = score_accuracy(&full, values, m).unwrap();
        expected.extend(score_horizontal(&remainder, &d.remainder_history, m).unwrap());
        let got: Vec<&MetricRecord> = raw.iter().filter(|r| r.series_id == d.series_id()).collect();
        check(
            got.len() == expected.len(),
            format!("series {}: record count", d.series_id()),
        )?;
        for e in &expected {
            let g = got
                .iter()
                .find(|r| r.origin == e.origin && r.metric == e.metric)
                .ok_or(format!("series {}: missing {}", d.series_id(), e.metric))?;
            check(
                g.value == e.value,
                format!("series {} {} origin {}", d.series_id(), e.metric, e.origin),
            )?;
        }
        let on_full = score_horizontal(&full, &origin_prefixes(&full, values), m).unwrap();
        differs |= on_full
            .iter()
            .zip(expected.iter().filter(|r| !r.metric.is_accuracy()))
            .any(|(a, b)| a.value != b.value);
    }
    check(
        differs,
        "remainder stability indistinguishable from full-forecast stability",
    )?;
    Ok(format!(
        "100 series: additivity {worst_add:e}, centring {worst_centre:e}; {} series scored on remainders",
        rd.series.len()
    ))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("FI_1 perfect stability", criterion_1),
        ("identity at w_s = 0", criterion_2),
        ("stabilization oracles", criterion_3),
        ("metric oracles", criterion_4),
        ("Pareto selection", criterion_5),
        ("Bonferroni constant", criterion_6),
        ("Wilcoxon exactness", criterion_7),
        ("end-to-end pattern", criterion_8),
        ("lag heuristic", criterion_9),
        ("decomposition and remainder scoring", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let outcome = std::panic::catch_unwind(run).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        match outcome {
            Ok(detail) => println!("PASS {:>2} {name}: {detail}", i + 1),
            Err(reason) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {reason}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
