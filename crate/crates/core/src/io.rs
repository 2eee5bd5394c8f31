//! CSV ingestion and emission.
//!
//! * datasets: `series_id,value` or `series_id,timestamp,value` (long format)
//! * forecasts: `series_id,origin_index,horizon,forecast`
//! * results: `model,variant,w_s,metric,value`
//! * raw per-origin values: `model,variant,w_s,series_id,origin_index,metric,value`

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{Dataset, ForecastMatrix, TimeSeries};

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::io(path, e))
}

fn create(path: &Path) -> Result<File> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    }
    File::create(path).map_err(|e| Error::io(path, e))
}

fn csv_err(e: csv::Error) -> Error {
    let row = e.position().map_or(0, |p| p.line() as usize);
    Error::Parse {
        row,
        message: e.to_string(),
    }
}

fn reader<R: Read>(r: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .flexible(false)
        .from_reader(r)
}

fn header(rdr: &mut csv::Reader<impl Read>) -> Result<Vec<String>> {
    Ok(rdr
        .headers()
        .map_err(csv_err)?
        .iter()
        .map(|h| h.to_ascii_lowercase())
        .collect())
}

fn line_of(rec: &csv::StringRecord) -> usize {
    rec.position().map_or(0, |p| p.line() as usize)
}

fn parse_f64(cell: &str, row: usize, what: &str) -> Result<f64> {
    cell.parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| Error::Parse {
            row,
            message: format!("{what} {cell:?} is not a finite number"),
        })
}

fn parse_usize(cell: &str, row: usize, what: &str) -> Result<usize> {
    cell.parse::<usize>().map_err(|_| Error::Parse {
        row,
        message: format!("{what} {cell:?} is not a non-negative integer"),
    })
}

/// A dataset plus how many missing cells were replaced by zero.
#[derive(Debug, Clone)]
pub struct Ingested {
    pub dataset: Dataset,
    pub substituted: usize,
}

pub fn read_long_csv(path: impl AsRef<Path>, m: usize) -> Result<Ingested> {
    let path = path.as_ref();
    let name = path
        .file_stem()
        .map_or_else(|| "dataset".to_string(), |s| s.to_string_lossy().into_owned());
    parse_long_csv(open(path)?, &name, m)
}

/// Timestamps sort numerically when every one parses as a number, lexically
/// otherwise (ISO dates sort correctly either way).
#[derive(Debug, Clone)]
struct Stamp(String);

fn compare_stamps(a: &str, b: &str, numeric: bool) -> Ordering {
    if numeric {
        let (x, y) = (a.parse::<f64>().unwrap_or(0.0), b.parse::<f64>().unwrap_or(0.0));
        x.total_cmp(&y)
    } else {
        a.cmp(b)
    }
}

pub fn parse_long_csv<R: Read>(input: R, name: &str, m: usize) -> Result<Ingested> {
    let mut rdr = reader(input);
    let cols = header(&mut rdr)?;
    let has_stamp = match cols.iter().map(String::as_str).collect::<Vec<_>>().as_slice() {
        ["series_id", "value"] => false,
        ["series_id", "timestamp", "value"] => true,
        _ => {
            return Err(Error::Format(format!(
                "expected header series_id,value or series_id,timestamp,value; got {}",
                cols.join(",")
            )))
        }
    };

    let mut order: Vec<String> = Vec::new();
    let mut rows: HashMap<String, Vec<(Option<Stamp>, f64, usize)>> = HashMap::new();
    let mut substituted = 0;
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = line_of(&rec);
        let id = rec.get(0).unwrap_or_default().to_string();
        if id.is_empty() {
            return Err(Error::Parse {
                row: line,
                message: "empty series_id".into(),
            });
        }
        let cell = rec.get(rec.len() - 1).unwrap_or_default();
        let value = if cell.is_empty() || cell.eq_ignore_ascii_case("na") {
            substituted += 1;
            0.0
        } else {
            parse_f64(cell, line, "value")?
        };
        let stamp = has_stamp.then(|| Stamp(rec.get(1).unwrap_or_default().to_string()));
        if !rows.contains_key(&id) {
            order.push(id.clone());
        }
        rows.entry(id).or_default().push((stamp, value, line));
    }
    if substituted > 0 {
        log::warn!("{name}: replaced {substituted} missing value(s) with 0");
    }

    let mut series = Vec::with_capacity(order.len());
    for id in order {
        let mut obs = rows.remove(&id).unwrap_or_default();
        if has_stamp {
            let numeric = obs
                .iter()
                .all(|(s, _, _)| s.as_ref().is_some_and(|s| s.0.parse::<f64>().is_ok()));
            obs.sort_by(|a, b| {
                let (sa, sb) = (a.0.as_ref().map_or("", |s| &s.0), b.0.as_ref().map_or("", |s| &s.0));
                compare_stamps(sa, sb, numeric).then(a.2.cmp(&b.2))
            });
            for pair in obs.windows(2) {
                let (sa, sb) = (
                    pair[0].0.as_ref().map_or("", |s| &s.0),
                    pair[1].0.as_ref().map_or("", |s| &s.0),
                );
                if compare_stamps(sa, sb, numeric) == Ordering::Equal {
                    return Err(Error::Parse {
                        row: pair[1].2.max(pair[0].2),
                        message: format!("duplicate timestamp {sb:?} for series {id}"),
                    });
                }
            }
        }
        let values = obs.into_iter().map(|(_, v, _)| v).collect();
        series.push(TimeSeries::new(id, values, m)?);
    }
    Ok(Ingested {
        dataset: Dataset::new(name, "", series)?,
        substituted,
    })
}

/// Reads a dense forecast grid per series. The returned matrices are not
/// yet anchored in time (`first_origin == 0`); see [`anchor`].
pub fn read_forecast_csv(path: impl AsRef<Path>) -> Result<Vec<ForecastMatrix>> {
    parse_forecast_csv(open(path.as_ref())?)
}

pub fn parse_forecast_csv<R: Read>(input: R) -> Result<Vec<ForecastMatrix>> {
    let mut rdr = reader(input);
    let cols = header(&mut rdr)?;
    if cols != ["series_id", "origin_index", "horizon", "forecast"] {
        return Err(Error::Format(format!(
            "expected header series_id,origin_index,horizon,forecast; got {}",
            cols.join(",")
        )));
    }
    let mut order: Vec<String> = Vec::new();
    let mut cells: HashMap<String, BTreeMap<(usize, usize), f64>> = HashMap::new();
    for rec in rdr.records() {
        let rec = rec.map_err(csv_err)?;
        let line = line_of(&rec);
        let id = rec[0].to_string();
        let origin = parse_usize(&rec[1], line, "origin_index")?;
        let horizon = parse_usize(&rec[2], line, "horizon")?;
        if origin == 0 || horizon == 0 {
            return Err(Error::Parse {
                row: line,
                message: "origin_index and horizon are 1-based".into(),
            });
        }
        let value = parse_f64(&rec[3], line, "forecast")?;
        if !cells.contains_key(&id) {
            order.push(id.clone());
        }
        if cells
            .entry(id.clone())
            .or_default()
            .insert((origin, horizon), value)
            .is_some()
        {
            return Err(Error::Parse {
                row: line,
                message: format!("duplicate forecast {id} origin {origin} horizon {horizon}"),
            });
        }
    }
    order
        .into_iter()
        .map(|id| {
            let grid = cells.remove(&id).unwrap_or_default();
            let origins = grid.keys().map(|k| k.0).max().unwrap_or(0);
            let h = grid.keys().map(|k| k.1).max().unwrap_or(0);
            let mut rows = Vec::with_capacity(origins);
            for o in 1..=origins {
                let mut row = Vec::with_capacity(h);
                for j in 1..=h {
                    let v = grid
                        .get(&(o, j))
                        .ok_or_else(|| Error::Format(format!("missing forecast {id} origin {o} horizon {j}")))?;
                    row.push(*v);
                }
                rows.push(row);
            }
            ForecastMatrix::new(id, 0, rows)
        })
        .collect()
}

/// Anchors each matrix on its series so the last window ends at the series
/// end, and checks the remaining invariants.
pub fn anchor(matrices: Vec<ForecastMatrix>, dataset: &Dataset) -> Result<Vec<ForecastMatrix>> {
    matrices
        .into_iter()
        .map(|m| {
            let series = dataset
                .get(m.series_id())
                .ok_or_else(|| Error::Format(format!("no series {} in the dataset", m.series_id())))?;
            let m = m.anchored_at_end(series.len())?;
            if let Some(v) = crate::types::validate(&m, series).into_iter().next() {
                return Err(Error::Format(format!("series {}: {v}", m.series_id())));
            }
            Ok(m)
        })
        .collect()
}

pub fn write_forecast_csv(matrices: &[ForecastMatrix], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut f = create(path)?;
    write_forecasts(matrices, &mut f).map_err(|e| Error::io(path, e))
}

pub fn write_forecasts<W: Write>(matrices: &[ForecastMatrix], out: &mut W) -> std::io::Result<()> {
    writeln!(out, "series_id,origin_index,horizon,forecast")?;
    for m in matrices {
        for (k, row) in m.rows().iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                // `{}` prints the shortest representation that round-trips.
                writeln!(out, "{},{},{},{}", m.series_id(), k + 1, j + 1, v)?;
            }
        }
    }
    Ok(())
}

/// Formats with six significant digits, keeping trailing zeros
/// (`0.813` -> `0.813000`, `12.5` -> `12.5000`).
pub fn format_sig6(v: f64) -> String {
    if !v.is_finite() {
        return "NA".into();
    }
    if v == 0.0 {
        return "0.00000".into();
    }
    let a = v.abs();
    if !(1e-4..1e6).contains(&a) {
        return format!("{v:.5e}");
    }
    let exp = a.log10().floor() as i32;
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{v:.decimals$}");
    // rounding can carry into a new leading digit (9.999996 -> 10.00000)
    let rounded: f64 = s.parse().unwrap_or(v);
    if rounded.abs() >= 10f64.powi(exp + 1) && decimals > 0 {
        let d = decimals - 1;
        return format!("{v:.d$}");
    }
    s
}

/// Short decimal for weights (`0.5`, `1`, `0.25`).
pub fn format_weight(w: f64) -> String {
    format!("{w}")
}

/// One aggregated cell of a results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub model: String,
    pub variant: String,
    pub weight: f64,
    pub metric: String,
    pub value: Option<f64>,
}

fn result_order(a: &ResultRow, b: &ResultRow) -> Ordering {
    a.model
        .cmp(&b.model)
        .then_with(|| a.variant.cmp(&b.variant))
        .then_with(|| a.weight.total_cmp(&b.weight))
        .then_with(|| a.metric.cmp(&b.metric))
}

pub fn write_results_csv(rows: &[ResultRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut f = create(path)?;
    write_results(rows, &mut f).map_err(|e| Error::io(path, e))
}

/// Rows sorted by model, variant, weight, metric.
pub fn write_results<W: Write>(rows: &[ResultRow], out: &mut W) -> std::io::Result<()> {
    let mut sorted: Vec<&ResultRow> = rows.iter().collect();
    sorted.sort_by(|a, b| result_order(a, b));
    writeln!(out, "model,variant,w_s,metric,value")?;
    for r in sorted {
        let value = r.value.map_or_else(|| "NA".to_string(), format_sig6);
        writeln!(
            out,
            "{},{},{},{},{}",
            r.model,
            r.variant,
            format_weight(r.weight),
            r.metric,
            value
        )?;
    }
    Ok(())
}

pub fn read_results_csv(path: impl AsRef<Path>) -> Result<Vec<ResultRow>> {
    parse_results_csv(open(path.as_ref())?)
}

pub fn parse_results_csv<R: Read>(input: R) -> Result<Vec<ResultRow>> {
    let mut rdr = reader(input);
    let cols = header(&mut rdr)?;
    if cols != ["model", "variant", "w_s", "metric", "value"] {
        return Err(Error::Format(format!(
            "expected header model,variant,w_s,metric,value; got {}",
            cols.join(",")
        )));
    }
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            let line = line_of(&rec);
            let value = match &rec[4] {
                "NA" | "" => None,
                v => Some(parse_f64(v, line, "value")?),
            };
            Ok(ResultRow {
                model: rec[0].to_string(),
                variant: rec[1].to_string(),
                weight: parse_f64(&rec[2], line, "w_s")?,
                metric: rec[3].to_string(),
                value,
            })
        })
        .collect()
}

/// One per-(series, origin) value of a variant.
#[derive(Debug, Clone, PartialEq)]
pub struct RawRow {
    pub model: String,
    pub variant: String,
    pub weight: f64,
    pub series_id: String,
    pub origin: usize,
    pub metric: String,
    pub value: Option<f64>,
}

pub fn write_raw_csv(rows: &[RawRow], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut f = std::io::BufWriter::new(create(path)?);
    let res: std::io::Result<()> = (|| {
        writeln!(f, "model,variant,w_s,series_id,origin_index,metric,value")?;
        for r in rows {
            let v = r.value.map_or_else(|| "NA".to_string(), |v| v.to_string());
            writeln!(
                f,
                "{},{},{},{},{},{},{}",
                r.model,
                r.variant,
                format_weight(r.weight),
                r.series_id,
                r.origin,
                r.metric,
                v
            )?;
        }
        f.flush()
    })();
    res.map_err(|e| Error::io(path, e))
}

pub fn read_raw_csv(path: impl AsRef<Path>) -> Result<Vec<RawRow>> {
    let mut rdr = reader(open(path.as_ref())?);
    let cols = header(&mut rdr)?;
    if cols
        != [
            "model",
            "variant",
            "w_s",
            "series_id",
            "origin_index",
            "metric",
            "value",
        ]
    {
        return Err(Error::Format(format!(
            "expected header model,variant,w_s,series_id,origin_index,metric,value; got {}",
            cols.join(",")
        )));
    }
    rdr.records()
        .map(|rec| {
            let rec = rec.map_err(csv_err)?;
            let line = line_of(&rec);
            let value = match &rec[6] {
                "NA" | "" => None,
                v => Some(parse_f64(v, line, "value")?),
            };
            Ok(RawRow {
                model: rec[0].to_string(),
                variant: rec[1].to_string(),
                weight: parse_f64(&rec[2], line, "w_s")?,
                series_id: rec[3].to_string(),
                origin: parse_usize(&rec[4], line, "origin_index")?,
                metric: rec[5].to_string(),
                value,
            })
        })
        .collect()
}

pub fn write_dataset_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let mut f = std::io::BufWriter::new(create(path)?);
    let res: std::io::Result<()> = (|| {
        writeln!(f, "series_id,timestamp,value")?;
        for s in dataset.series() {
            for (t, v) in s.values().iter().enumerate() {
                writeln!(f, "{},{},{}", s.id(), t + 1, v)?;
            }
        }
        f.flush()
    })();
    res.map_err(|e| Error::io(path, e))
}
