//! Run configuration: flat `key = value` files with `#` comments.
//!
//! ```text
//! dataset = data/monthly.csv
//! period = 12
//! horizon = 6
//! origins = 13
//! model = pooled
//! grid = 0.2, 0.4, 0.5, 0.6, 0.8, 1
//! methods = partial, full
//! ```

use std::path::{Path, PathBuf};

use crate::error::{check_weight, Error, Result};
use crate::evaluation::{SweepConfig, DEFAULT_GRID};
use crate::models::{BaseModel, HoltParams};
use crate::types::{Direction, Method};

pub const KEYS: [&str; 19] = [
    "dataset",
    "forecasts",
    "period",
    "horizon",
    "origins",
    "model",
    "lags",
    "mean_scale",
    "tune",
    "grid",
    "direction",
    "methods",
    "w2",
    "output",
    "delta_max",
    "alpha",
    "comparisons",
    "jobs",
    "seed",
];

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub dataset: Option<PathBuf>,
    /// External forecast CSV used instead of a built-in model; also set by
    /// `model = external:<path>`.
    pub forecasts: Option<PathBuf>,
    pub period: usize,
    pub horizon: usize,
    pub origins: usize,
    pub model: String,
    pub lags: Option<usize>,
    pub mean_scale: bool,
    pub tune: bool,
    pub grid: Vec<f64>,
    pub direction: Direction,
    pub methods: Vec<Method>,
    pub w2: Option<f64>,
    pub output: PathBuf,
    /// Accuracy budget in percent.
    pub delta_max: Option<f64>,
    pub alpha: f64,
    pub comparisons: usize,
    /// Worker threads; 0 uses every core.
    pub jobs: usize,
    pub seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            dataset: None,
            forecasts: None,
            period: 1,
            horizon: 6,
            origins: 13,
            model: "pooled".into(),
            lags: None,
            mean_scale: false,
            tune: false,
            grid: DEFAULT_GRID.to_vec(),
            direction: Direction::Vertical,
            methods: vec![Method::Partial, Method::Full],
            w2: None,
            output: PathBuf::from("results"),
            delta_max: None,
            alpha: 0.05,
            comparisons: 1,
            jobs: 0,
            seed: 42,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::Config(format!("{key}: cannot parse {value:?}")))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "1" | "on" => Ok(true),
        "false" | "no" | "0" | "off" => Ok(false),
        _ => Err(Error::Config(format!("{key}: expected true or false, got {value:?}"))),
    }
}

fn positive(key: &str, value: &str) -> Result<usize> {
    let v: usize = parse(key, value)?;
    if v == 0 {
        return Err(Error::Config(format!("{key} must be positive")));
    }
    Ok(v)
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split([',', ' ']).map(str::trim).filter(|s| !s.is_empty())
}

impl RunConfig {
    /// Reads a config file on top of the defaults.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut config = Self::default();
        config.apply_text(&text)?;
        Ok(config)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or_default().trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(key, value)
                .map_err(|e| Error::Config(format!("line {}: {}", n + 1, strip(e))))?;
        }
        Ok(())
    }

    /// Sets one key; `-` and `_` are interchangeable in key names. Every
    /// failure is reported as a configuration error.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        self.set_value(key, value).map_err(|e| Error::Config(strip(e)))
    }

    fn set_value(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().to_ascii_lowercase().replace('-', "_");
        let value = value.trim();
        let optional = |v: &str| !(v.is_empty() || v.eq_ignore_ascii_case("none"));
        match key.as_str() {
            "dataset" => self.dataset = optional(value).then(|| PathBuf::from(value)),
            "forecasts" => self.forecasts = optional(value).then(|| PathBuf::from(value)),
            "period" => self.period = positive(&key, value)?,
            "horizon" => self.horizon = positive(&key, value)?,
            "origins" => self.origins = positive(&key, value)?,
            "model" => match value.split_once(':') {
                Some((kind, path)) if kind.eq_ignore_ascii_case("external") => {
                    if path.trim().is_empty() {
                        return Err(Error::Config("external model needs a forecast path".into()));
                    }
                    self.forecasts = Some(PathBuf::from(path.trim()));
                }
                _ => {
                    value.parse::<BaseModel>()?;
                    self.model = value.to_ascii_lowercase();
                }
            },
            "lags" => {
                self.lags = if optional(value) {
                    Some(positive(&key, value)?)
                } else {
                    None
                }
            }
            "mean_scale" => self.mean_scale = parse_bool(&key, value)?,
            "tune" => self.tune = parse_bool(&key, value)?,
            "grid" => {
                let grid = list(value).map(|v| parse(&key, v)).collect::<Result<Vec<f64>>>()?;
                for &w in &grid {
                    check_weight(w)?;
                }
                self.grid = grid;
            }
            "direction" => self.direction = value.parse()?,
            "methods" => {
                let methods = list(value).map(str::parse).collect::<Result<Vec<Method>>>()?;
                if methods.is_empty() {
                    return Err(Error::Config("methods must not be empty".into()));
                }
                self.methods = methods;
            }
            "w2" => {
                self.w2 = if optional(value) {
                    let w: f64 = parse(&key, value)?;
                    check_weight(w)?;
                    Some(w)
                } else {
                    None
                }
            }
            "output" => self.output = PathBuf::from(value),
            "delta_max" => {
                self.delta_max = if optional(value) {
                    let d: f64 = parse(&key, value)?;
                    if d.is_nan() || d < 0.0 {
                        return Err(Error::Config("delta_max must be non-negative".into()));
                    }
                    Some(d)
                } else {
                    None
                }
            }
            "alpha" => {
                let a: f64 = parse(&key, value)?;
                if !(a > 0.0 && a <= 1.0) {
                    return Err(Error::Config(format!("alpha {a} not in (0, 1]")));
                }
                self.alpha = a;
            }
            "comparisons" => self.comparisons = positive(&key, value)?,
            "jobs" => self.jobs = parse(&key, value)?,
            "seed" => self.seed = parse(&key, value)?,
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn base_model(&self) -> Result<BaseModel> {
        Ok(match self.model.parse::<BaseModel>()? {
            BaseModel::Holt { params, .. } => BaseModel::Holt {
                params,
                tune: self.tune,
            },
            BaseModel::Pooled { .. } => BaseModel::Pooled {
                lags: self.lags,
                mean_scale: self.mean_scale,
            },
            other => other,
        })
    }

    pub fn sweep_config(&self) -> SweepConfig {
        SweepConfig {
            horizon: self.horizon,
            origins: self.origins,
            grid: self.grid.clone(),
            methods: self.methods.clone(),
            direction: self.direction,
            secondary_weight: self.w2,
            trend_params: HoltParams::default(),
        }
    }
}

fn strip(e: Error) -> String {
    match e {
        Error::Config(m) => m,
        other => other.to_string(),
    }
}
