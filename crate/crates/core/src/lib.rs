//! Forecast stabilization: vertical, horizontal and joint smoothing of
//! rolling-origin forecasts, scaled accuracy and stability metrics, and
//! accuracy/stability trade-off analysis.

pub mod cli;
pub mod config;
pub mod decomposition;
pub mod error;
pub mod evaluation;
pub mod io;
pub mod metrics;
pub mod models;
pub mod pareto;
pub mod pipeline;
pub mod stabilize;
pub mod synthetic;
pub mod types;

pub use error::{Error, Result};
pub use types::{Dataset, Direction, ForecastMatrix, Method, StabilizationSpec, TimeSeries};
