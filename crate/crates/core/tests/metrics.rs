use proptest::prelude::*;
use stabcast::metrics::{
    accuracy, horizontal_change, score_accuracy, score_horizontal, score_vertical, vertical_change, Accuracy, Change,
    HorizontalVariant, Metric, MetricRecord, MetricValue, Undefined,
};
use stabcast::types::first_origin_for;
use stabcast::ForecastMatrix;

mod common;
use common::{horizontal_pairs, initial_pairs, naive_scale, scaled, smape, vertical_pairs};

#[derive(Debug, Clone)]
struct Case {
    values: Vec<f64>,
    rows: Vec<Vec<f64>>,
    m: usize,
}

impl Case {
    fn matrix(&self) -> ForecastMatrix {
        let t0 = first_origin_for(self.values.len(), self.rows[0].len(), self.rows.len()).unwrap();
        ForecastMatrix::new("s", t0, self.rows.clone()).unwrap()
    }

    fn scaled_by(&self, a: f64) -> Case {
        Case {
            values: self.values.iter().map(|v| v * a).collect(),
            rows: self.rows.iter().map(|r| r.iter().map(|v| v * a).collect()).collect(),
            m: self.m,
        }
    }
}

fn case_strategy() -> impl Strategy<Value = Case> {
    (1usize..=4, 1usize..=6, 1usize..=6, 2usize..=10).prop_flat_map(|(m, h, o, extra)| {
        let n = m + h + o + extra;
        (
            prop::collection::vec(-100.0f64..100.0, n),
            prop::collection::vec(prop::collection::vec(-100.0f64..100.0, h), o),
        )
            .prop_map(move |(values, rows)| Case { values, rows, m })
    })
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

proptest! {
    #![proptest_config(ProptestConfig::with_cases(500))]

    #[test]
    fn accuracy_matches_flat_oracle(case in case_strategy()) {
        let fm = case.matrix();
        let h = fm.horizon();
        let got = score_accuracy(&fm, &case.values, case.m).unwrap();
        for k in 1..=fm.origins() {
            let t = fm.origin_time(k);
            let pairs: Vec<(f64, f64)> = (0..h).map(|j| (case.values[t + j], case.rows[k - 1][j])).collect();
            let training = &case.values[..t];
            prop_assert!(close(lookup(&got, k, Metric::Mase).unwrap(), scaled(&pairs, training, case.m, false)));
            prop_assert!(close(lookup(&got, k, Metric::Rmsse).unwrap(), scaled(&pairs, training, case.m, true)));
            prop_assert!(close(lookup(&got, k, Metric::Smape).unwrap(), smape(&pairs)));
        }
    }

    #[test]
    fn vertical_matches_flat_oracle(case in case_strategy()) {
        let fm = case.matrix();
        let got = score_vertical(&fm, &case.values, case.m).unwrap();
        prop_assert_eq!(got.len(), (fm.origins() - 1) * 5);
        for k in 2..=fm.origins() {
            let training = &case.values[..fm.origin_time(k) - 1];
            let v = vertical_pairs(&case.rows, k - 1);
            let i = initial_pairs(&case.rows, k - 1);
            let checks = [
                (Metric::MascV, &v, false),
                (Metric::RmsscV, &v, true),
                (Metric::MascIV, &i, false),
                (Metric::RmsscIV, &i, true),
            ];
            for (metric, pairs, squared) in checks {
                match lookup(&got, k, metric) {
                    Some(x) => prop_assert!(close(x, scaled(pairs, training, case.m, squared))),
                    None => prop_assert!(pairs.is_empty()),
                }
            }
            if let Some(x) = lookup(&got, k, Metric::Smapc) {
                prop_assert!(close(x, smape(&v)));
            }
        }
    }

    #[test]
    fn horizontal_matches_flat_oracle(case in case_strategy()) {
        let fm = case.matrix();
        let prefixes: Vec<&[f64]> = (1..=fm.origins()).map(|k| &case.values[..fm.origin_time(k)]).collect();
        let got = score_horizontal(&fm, &prefixes, case.m).unwrap();
        for k in 1..=fm.origins() {
            let row = &case.rows[k - 1];
            let adj = horizontal_pairs(row, false);
            let ini = horizontal_pairs(row, true);
            for (metric, pairs, squared) in [
                (Metric::MascH, &adj, false),
                (Metric::RmsscH, &adj, true),
                (Metric::MascIH, &ini, false),
                (Metric::RmsscIH, &ini, true),
            ] {
                match lookup(&got, k, metric) {
                    Some(x) => prop_assert!(close(x, scaled(pairs, prefixes[k - 1], case.m, squared))),
                    None => prop_assert!(pairs.is_empty()),
                }
            }
        }
    }

    #[test]
    fn scaled_measures_are_scale_free(case in case_strategy()) {
        let base = case.matrix();
        let mut all = score_accuracy(&base, &case.values, case.m).unwrap();
        all.extend(score_vertical(&base, &case.values, case.m).unwrap());
        for a in [1e-3, 1.0, 1e3] {
            let c = case.scaled_by(a);
            let fm = c.matrix();
            let mut other = score_accuracy(&fm, &c.values, c.m).unwrap();
            other.extend(score_vertical(&fm, &c.values, c.m).unwrap());
            for (x, y) in all.iter().zip(&other) {
                prop_assert_eq!(x.metric, y.metric);
                if let (Some(p), Some(q)) = (x.value.value(), y.value.value()) {
                    prop_assert!(close(p, q), "{:?} {} vs {}", x.metric, p, q);
                }
            }
        }
    }

    #[test]
    fn values_are_nonnegative_and_smape_bounded(case in case_strategy()) {
        let fm = case.matrix();
        let prefixes: Vec<&[f64]> = (1..=fm.origins()).map(|k| &case.values[..fm.origin_time(k)]).collect();
        let mut all = score_accuracy(&fm, &case.values, case.m).unwrap();
        all.extend(score_vertical(&fm, &case.values, case.m).unwrap());
        all.extend(score_horizontal(&fm, &prefixes, case.m).unwrap());
        for r in &all {
            if let Some(v) = r.value.value() {
                prop_assert!(v >= 0.0);
                if matches!(r.metric, Metric::Smape | Metric::Smapc) {
                    prop_assert!(v <= 200.0 + 1e-9);
                }
            }
        }
    }

    #[test]
    fn rmssc_squared_is_mean_squared_scaled_change(case in case_strategy()) {
        let fm = case.matrix();
        for k in 2..=fm.origins() {
            let training = &case.values[..fm.origin_time(k) - 1];
            let v = vertical_change(Change::Rmssc, &case.rows[k - 1], &case.rows[k - 2], training, case.m).unwrap();
            let pairs = vertical_pairs(&case.rows, k - 1);
            if let MetricValue::Defined(x) = v {
                let s = naive_scale(training, case.m, true).sqrt();
                let mean: f64 = pairs.iter().map(|(a, b)| ((a - b) / s).powi(2)).sum::<f64>() / pairs.len() as f64;
                prop_assert!(close(x * x, mean));
            }
        }
    }
}

#[test]
fn hand_computed_values() {
    let training = [1.0, 2.0, 3.0, 4.0];
    let v = accuracy(Accuracy::Mase, &[5.0, 6.0], &[4.0, 4.0], &training, 1).unwrap();
    assert_eq!(v, MetricValue::Defined(1.5));
    let v = accuracy(Accuracy::Rmsse, &[5.0, 6.0], &[4.0, 4.0], &training, 1).unwrap();
    assert!((v.value().unwrap() - 2.5f64.sqrt()).abs() < 1e-15);
    let v = accuracy(Accuracy::Smape, &[0.0, 2.0], &[0.0, 1.0], &training, 1).unwrap();
    assert!((v.value().unwrap() - 100.0 / 3.0).abs() < 1e-12);

    let v = vertical_change(Change::Masc, &[10.0, 12.0, 14.0], &[9.0, 11.0, 13.0], &training, 1).unwrap();
    assert_eq!(v, MetricValue::Defined(1.0));
    let v = horizontal_change(
        Change::Masc,
        &[1.0, 3.0, 2.0],
        &training,
        1,
        HorizontalVariant::Adjacent,
    )
    .unwrap();
    assert_eq!(v, MetricValue::Defined(1.5));
    let v = horizontal_change(Change::Masc, &[1.0, 3.0, 2.0], &training, 1, HorizontalVariant::Initial).unwrap();
    assert_eq!(v, MetricValue::Defined(1.5));
}

#[test]
fn undefined_cases() {
    let flat = [3.0; 5];
    let v = accuracy(Accuracy::Mase, &[1.0], &[2.0], &flat, 1).unwrap();
    assert_eq!(v, MetricValue::Undefined(Undefined::ZeroScale));
    let v = vertical_change(Change::Masc, &[1.0], &[2.0], &[1.0, 2.0, 4.0], 1).unwrap();
    assert_eq!(v, MetricValue::Undefined(Undefined::NoOverlap));
    assert!(accuracy(Accuracy::Mase, &[1.0], &[2.0], &[1.0], 1).is_err());
    assert!(accuracy(Accuracy::Mase, &[1.0, 2.0], &[2.0], &training_of(6), 1).is_err());
}

fn training_of(n: usize) -> Vec<f64> {
    (0..n).map(|i| i as f64).collect()
}
