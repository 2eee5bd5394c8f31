//! Command-line front end.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 internal error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::evaluation::{
    metrics_for, run_sweep, score_matrix, significance_report, ForecastSource, Pairing, SweepResult, Variant,
};
use crate::io::{
    anchor, read_forecast_csv, read_long_csv, read_raw_csv, read_results_csv, write_dataset_csv, write_forecast_csv,
    write_raw_csv, write_results_csv, ResultRow,
};
use crate::metrics::aggregate;
use crate::models::rolling_origin_forecasts;
use crate::pareto::{analyze, points_from_results, Smoothing, TradeoffPoint};
use crate::stabilize::{apply, clamp_nonnegative};
use crate::synthetic::{generate, SyntheticSpec};
use crate::types::{Direction, ForecastMatrix, Method, StabilizationSpec};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "stabcast",
    version,
    about = "Forecast stabilization and accuracy/stability trade-off analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Rolling-origin forecasts of a dataset with a built-in model.
    Forecast(RunArgs),
    /// Stabilize a forecast CSV.
    Stabilize(StabilizeArgs),
    /// Score a forecast CSV against a dataset.
    Evaluate(EvaluateArgs),
    /// Base forecasts plus every stabilization variant of the weight grid.
    Sweep(RunArgs),
    /// Pareto front and knee selection from a results or points CSV.
    Pareto(ParetoArgs),
    /// Wilcoxon tests of variants against a baseline from raw sweep values.
    Wilcoxon(WilcoxonArgs),
    /// Generate a seeded synthetic dataset.
    Synth(SynthArgs),
}

/// Flags mirroring the configuration keys.
#[derive(Debug, Args)]
struct RunArgs {
    /// Configuration file of `key = value` lines.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Dataset CSV (`series_id,value` or `series_id,timestamp,value`).
    #[arg(long)]
    dataset: Option<String>,
    /// Forecast CSV to use instead of a built-in model.
    #[arg(long)]
    forecasts: Option<String>,
    /// Seasonal period.
    #[arg(long)]
    period: Option<String>,
    #[arg(long)]
    horizon: Option<String>,
    /// Number of rolling origins.
    #[arg(long)]
    origins: Option<String>,
    /// snaive, holt or pooled.
    #[arg(long)]
    model: Option<String>,
    /// Lag count of the pooled model.
    #[arg(long)]
    lags: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    mean_scale: Option<String>,
    #[arg(long, num_args = 0..=1, default_missing_value = "true")]
    tune: Option<String>,
    /// Comma-separated weights.
    #[arg(long)]
    grid: Option<String>,
    /// vertical, horizontal, joint_vh or joint_hv.
    #[arg(long)]
    direction: Option<String>,
    /// Comma-separated: partial, full.
    #[arg(long)]
    methods: Option<String>,
    /// Horizontal weight of joint directions.
    #[arg(long)]
    w2: Option<String>,
    /// Output file (forecast) or directory (sweep).
    #[arg(long)]
    output: Option<String>,
    /// Accuracy budget in percent.
    #[arg(long)]
    delta_max: Option<String>,
    #[arg(long)]
    alpha: Option<String>,
    /// Bonferroni comparison count.
    #[arg(long)]
    comparisons: Option<String>,
    /// Worker threads (0 = all cores).
    #[arg(long)]
    jobs: Option<String>,
    #[arg(long)]
    seed: Option<String>,
}

impl RunArgs {
    fn resolve(&self) -> Result<RunConfig> {
        let mut config = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        let flags = [
            ("dataset", &self.dataset),
            ("forecasts", &self.forecasts),
            ("period", &self.period),
            ("horizon", &self.horizon),
            ("origins", &self.origins),
            ("model", &self.model),
            ("lags", &self.lags),
            ("mean_scale", &self.mean_scale),
            ("tune", &self.tune),
            ("grid", &self.grid),
            ("direction", &self.direction),
            ("methods", &self.methods),
            ("w2", &self.w2),
            ("output", &self.output),
            ("delta_max", &self.delta_max),
            ("alpha", &self.alpha),
            ("comparisons", &self.comparisons),
            ("jobs", &self.jobs),
            ("seed", &self.seed),
        ];
        for (key, value) in flags {
            if let Some(v) = value {
                config.set(key, v)?;
            }
        }
        Ok(config)
    }
}

#[derive(Debug, Args)]
struct StabilizeArgs {
    /// Forecast CSV to stabilize.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, default_value = "vertical")]
    direction: String,
    /// partial or full.
    #[arg(long, default_value = "full")]
    method: String,
    /// Weight on the previous forecast.
    #[arg(long)]
    w: f64,
    /// Horizontal weight of joint directions.
    #[arg(long)]
    w2: Option<f64>,
    /// Replace negative stabilized forecasts with zero.
    #[arg(long)]
    clamp: bool,
    #[arg(long)]
    output: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Scope {
    Vertical,
    Horizontal,
    All,
}

#[derive(Debug, Args)]
struct EvaluateArgs {
    #[arg(long)]
    forecasts: PathBuf,
    #[arg(long)]
    dataset: PathBuf,
    #[arg(long, default_value_t = 1)]
    period: usize,
    /// Which stability metrics to report besides accuracy.
    #[arg(long, value_enum, default_value = "all")]
    scope: Scope,
    /// Model column of the output.
    #[arg(long, default_value = "EXT")]
    model: String,
    /// Variant column of the output (base, PI, FI).
    #[arg(long, default_value = "base")]
    variant: String,
    /// Weight column of the output.
    #[arg(long, default_value_t = 0.0)]
    w: f64,
    /// Results CSV; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ParetoArgs {
    /// Results CSV of a sweep.
    #[arg(long, conflicts_with = "points", required_unless_present = "points")]
    results: Option<PathBuf>,
    /// CSV with header `label,accuracy,stability`.
    #[arg(long)]
    points: Option<PathBuf>,
    /// Model to analyse; every model of the results file when absent.
    #[arg(long)]
    model: Option<String>,
    #[arg(long, default_value = "MASE")]
    accuracy: String,
    #[arg(long, default_value = "MASC_V")]
    stability: String,
    /// Accuracy budget in percent.
    #[arg(long)]
    delta_max: Option<f64>,
    /// Fit a convex spline with this many interior knots instead of the hull.
    #[arg(long)]
    spline_knots: Option<usize>,
    #[arg(long, default_value = "pareto")]
    output: PathBuf,
}

#[derive(Debug, Args)]
struct WilcoxonArgs {
    /// Raw per-origin CSV written by `sweep`.
    #[arg(long)]
    raw: PathBuf,
    #[arg(long, default_value = "base")]
    baseline: String,
    /// Candidate variants such as FI_0.5; every other variant when absent.
    #[arg(long = "candidate")]
    candidates: Vec<String>,
    #[arg(long, default_value_t = 0.05)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    comparisons: usize,
    /// Pair per-series origin averages or individual origins.
    #[arg(long, default_value = "series")]
    pairing: String,
    /// Text report; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 10)]
    series: usize,
    #[arg(long, default_value_t = 120)]
    length: usize,
    #[arg(long, default_value_t = 12)]
    period: usize,
    /// Noise standard deviation relative to the level.
    #[arg(long, default_value_t = 0.05)]
    noise: f64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    #[arg(long)]
    output: PathBuf,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) => EXIT_USAGE,
        _ => EXIT_DATA,
    }
}

/// Parses `argv` (program name first), runs the command and returns the
/// process exit code.
pub fn dispatch<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let outcome = std::panic::catch_unwind(|| run(cli));
    match outcome {
        Ok(Ok(())) => EXIT_OK,
        Ok(Err(e)) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
        Err(_) => {
            eprintln!("error: internal failure");
            EXIT_INTERNAL
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Forecast(args) => with_jobs(&args.resolve()?, forecast),
        Command::Sweep(args) => with_jobs(&args.resolve()?, sweep),
        Command::Stabilize(args) => stabilize(&args),
        Command::Evaluate(args) => evaluate(&args),
        Command::Pareto(args) => pareto(&args),
        Command::Wilcoxon(args) => wilcoxon(&args),
        Command::Synth(args) => synth(&args),
    }
}

fn with_jobs(config: &RunConfig, f: fn(&RunConfig) -> Result<()>) -> Result<()> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::Config(format!("cannot start {} workers: {e}", config.jobs)))?;
    pool.install(|| f(config))
}

fn require_dataset(config: &RunConfig) -> Result<&Path> {
    config
        .dataset
        .as_deref()
        .ok_or_else(|| Error::Config("no dataset given (--dataset or `dataset =`)".into()))
}

fn forecast(config: &RunConfig) -> Result<()> {
    let data = read_long_csv(require_dataset(config)?, config.period)?;
    let rf = rolling_origin_forecasts(&data.dataset, &config.base_model()?, config.horizon, config.origins)?;
    if rf.matrices.is_empty() {
        return Err(Error::Format("no series could be forecast".into()));
    }
    write_forecast_csv(&rf.matrices, &config.output)
}

fn sweep(config: &RunConfig) -> Result<()> {
    let data = read_long_csv(require_dataset(config)?, config.period)?;
    let dataset = &data.dataset;
    let model = config.base_model()?;
    let external;
    let source = match &config.forecasts {
        Some(path) => {
            external = anchor(read_forecast_csv(path)?, dataset)?;
            ForecastSource::External(&external)
        }
        None => ForecastSource::Model(&model),
    };
    let result = run_sweep(dataset, source, &config.sweep_config())?;
    let dir = &config.output;
    write_results_csv(&result.result_rows(), dir.join("results.csv"))?;
    write_raw_csv(&result.raw_rows(), dir.join("raw.csv"))?;
    let candidates: Vec<Variant> = result.variants[1..].iter().map(|v| v.variant).collect();
    let report = significance_report(
        &result,
        &Variant::BASE,
        &candidates,
        config.alpha,
        config.comparisons,
        Pairing::Series,
    )?;
    let path = dir.join("significance.txt");
    std::fs::write(&path, report.to_string()).map_err(|e| Error::io(&path, e))?;
    if !result.skipped.is_empty() {
        eprintln!("skipped {} series", result.skipped.len());
    }
    println!(
        "{} series, {} variants -> {}",
        result.variants[0]
            .raw
            .iter()
            .map(|r| &r.series_id)
            .collect::<std::collections::HashSet<_>>()
            .len(),
        result.variants.len(),
        dir.display()
    );
    Ok(())
}

fn stabilize(args: &StabilizeArgs) -> Result<()> {
    let direction: Direction = args.direction.parse()?;
    let method: Method = args.method.parse()?;
    let secondary = match direction {
        Direction::JointVh | Direction::JointHv => Some(args.w2.unwrap_or(args.w)),
        _ => None,
    };
    let spec = StabilizationSpec::with_secondary(direction, method, args.w, secondary)
        .map_err(|e| Error::Config(e.to_string()))?;
    let matrices = read_forecast_csv(&args.input)?;
    let stable = matrices
        .iter()
        .map(|m| {
            let s = apply(m, &spec)?;
            Ok(if args.clamp { clamp_nonnegative(&s) } else { s })
        })
        .collect::<Result<Vec<ForecastMatrix>>>()?;
    write_forecast_csv(&stable, &args.output)
}

fn evaluate(args: &EvaluateArgs) -> Result<()> {
    let data = read_long_csv(&args.dataset, args.period)?;
    let matrices = anchor(read_forecast_csv(&args.forecasts)?, &data.dataset)?;
    let direction = match args.scope {
        Scope::Vertical => Direction::Vertical,
        Scope::Horizontal => Direction::Horizontal,
        Scope::All => Direction::JointVh,
    };
    let mut records = Vec::new();
    for m in &matrices {
        let series = data
            .dataset
            .get(m.series_id())
            .ok_or_else(|| Error::Format(format!("no series {}", m.series_id())))?;
        records.extend(score_matrix(m, series.values(), args.period, direction)?);
    }
    let rows: Vec<ResultRow> = metrics_for(direction)
        .into_iter()
        .map(|metric| ResultRow {
            model: args.model.clone(),
            variant: args.variant.clone(),
            weight: args.w,
            metric: metric.name().to_string(),
            value: aggregate(records.iter().filter(|r| r.metric == metric).map(|r| r.value)).mean,
        })
        .collect();
    match &args.output {
        Some(path) => write_results_csv(&rows, path),
        None => crate::io::write_results(&rows, &mut std::io::stdout().lock()).map_err(|e| Error::io("<stdout>", e)),
    }
}

fn read_points(path: &Path) -> Result<Vec<TradeoffPoint>> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, h)) if h.trim().eq_ignore_ascii_case("label,accuracy,stability") => {}
        _ => return Err(Error::Format("expected header label,accuracy,stability".into())),
    }
    lines
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(n, l)| {
            let cells: Vec<&str> = l.split(',').map(str::trim).collect();
            let bad = |message: &str| Error::Parse {
                row: n + 1,
                message: message.to_string(),
            };
            if cells.len() != 3 {
                return Err(bad("expected three cells"));
            }
            let a = cells[1].parse().map_err(|_| bad("accuracy is not a number"))?;
            let s = cells[2].parse().map_err(|_| bad("stability is not a number"))?;
            TradeoffPoint::new(cells[0], a, s)
        })
        .collect()
}

fn pareto(args: &ParetoArgs) -> Result<()> {
    let mode = match args.spline_knots {
        Some(knots) => Smoothing::Spline { knots },
        None => Smoothing::Hull,
    };
    let sets: Vec<(String, Vec<TradeoffPoint>)> = match (&args.points, &args.results) {
        (Some(path), _) => {
            let stem = path
                .file_stem()
                .map_or("points".into(), |s| s.to_string_lossy().into_owned());
            vec![(stem, read_points(path)?)]
        }
        (None, Some(path)) => {
            let rows = read_results_csv(path)?;
            let mut models: Vec<String> = Vec::new();
            for r in &rows {
                if !models.contains(&r.model) {
                    models.push(r.model.clone());
                }
            }
            if let Some(m) = &args.model {
                models.retain(|x| x == m);
            }
            if models.is_empty() {
                return Err(Error::Format("no matching model in the results".into()));
            }
            models
                .into_iter()
                .map(|m| {
                    let pts = points_from_results(&rows, &m, &args.accuracy, &args.stability)?;
                    Ok((m, pts))
                })
                .collect::<Result<_>>()?
        }
        (None, None) => return Err(Error::Config("give --results or --points".into())),
    };
    for (name, points) in sets {
        let analysis = analyze(&points, args.delta_max, mode)?;
        let title = format!("{name}: {} vs {}", args.accuracy, args.stability);
        analysis.write_files(&args.output, &format!("pareto_{name}"), &title)?;
        println!("{name}: {}", analysis.summary());
    }
    Ok(())
}

fn wilcoxon(args: &WilcoxonArgs) -> Result<()> {
    let pairing = match args.pairing.to_ascii_lowercase().as_str() {
        "series" => Pairing::Series,
        "origin" => Pairing::Origin,
        other => return Err(Error::Config(format!("unknown pairing {other:?}"))),
    };
    let baseline: Variant = args.baseline.parse()?;
    let mut text = String::new();
    for sweep in SweepResult::from_raw(&read_raw_csv(&args.raw)?)? {
        let candidates: Vec<Variant> = if args.candidates.is_empty() {
            sweep
                .variants
                .iter()
                .map(|v| v.variant)
                .filter(|v| *v != baseline)
                .collect()
        } else {
            args.candidates.iter().map(|c| c.parse()).collect::<Result<_>>()?
        };
        let report = significance_report(&sweep, &baseline, &candidates, args.alpha, args.comparisons, pairing)
            .map_err(|e| match e {
                Error::Domain(m) => Error::Config(m),
                other => other,
            })?;
        text.push_str(&report.to_string());
    }
    match &args.output {
        Some(path) => std::fs::write(path, text).map_err(|e| Error::io(path, e)),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn synth(args: &SynthArgs) -> Result<()> {
    let dataset = generate(&SyntheticSpec {
        series: args.series,
        length: args.length,
        period: args.period,
        noise: args.noise,
        seed: args.seed,
    })
    .map_err(|e| Error::Config(e.to_string()))?;
    write_dataset_csv(&dataset, &args.output)
}
