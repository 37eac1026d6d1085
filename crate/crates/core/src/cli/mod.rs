//! Command-line interface: `fit`, `predict`, `evaluate`, `scan` and `bench`.
//!
//! Exit codes: 0 success, 1 usage or configuration error, 2 data error,
//! 3 numerical failure.

pub mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

use crate::error::{PmbsiError, Result};
use config::{RunConfig, Settings};
use report::ModelFile;

#[derive(Debug, Parser)]
#[command(name = "pmbsi", version, about = "Forecasting with string invariants tuned by a genetic algorithm")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit a model per horizon and report evaluation and validation errors.
    Fit(CommonArgs),
    /// Forecast the values following the end of a series with a stored model.
    Predict {
        #[command(flatten)]
        common: CommonArgs,
        /// Model file written by `fit`.
        #[arg(long)]
        model: PathBuf,
        /// Number of values to emit.
        #[arg(long, default_value_t = 1)]
        steps: usize,
    },
    /// Score a stored model on the split of a series without refitting.
    Evaluate {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long)]
        model: PathBuf,
    },
    /// Evaluation error over a grid of string lengths and Q values.
    Scan {
        #[command(flatten)]
        common: CommonArgs,
        /// String lengths: `min:max` or a comma list.
        #[arg(long = "ls", default_value = "2:10")]
        l_s: String,
        /// Q values: `min:max:count` or a comma list.
        #[arg(long = "q", default_value = "0.01,0.1,0.5,1,2")]
        q: String,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        eta1: f64,
        #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
        eta2: f64,
    },
    /// Fit and score every series file of a directory.
    Bench {
        #[command(flatten)]
        common: CommonArgs,
        /// Directory of one-column series files.
        #[arg(long)]
        dir: PathBuf,
    },
}

/// Flags shared by all subcommands. Each one overrides the same key of `--config`.
#[derive(Debug, Args)]
struct CommonArgs {
    /// `key = value` file with defaults for any flag.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    /// Forecast horizon; `fit` accepts a comma list.
    #[arg(long)]
    horizon: Option<String>,
    /// `direct` or `iterated`.
    #[arg(long)]
    mode: Option<String>,
    #[arg(long)]
    valid_frac: Option<f64>,
    /// Train to evaluation ratio, `6:4`.
    #[arg(long)]
    train_eval_ratio: Option<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Search range `param=min:max`; repeatable.
    #[arg(long)]
    bounds: Vec<String>,
    /// `standard` or `literal`.
    #[arg(long)]
    smape_variant: Option<String>,
    /// Positivity margin added after shifting the minimum to zero.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    population_size: Option<usize>,
    #[arg(long)]
    tournament_size: Option<usize>,
    #[arg(long)]
    elite_fraction: Option<f64>,
    #[arg(long)]
    stop_no_progress: Option<usize>,
    #[arg(long)]
    mutation_rate: Option<f64>,
    #[arg(long)]
    mutation_probability: Option<f64>,
}

impl CommonArgs {
    fn run_config(&self) -> Result<RunConfig> {
        let mut settings = match &self.config {
            Some(path) => Settings::load(path)?,
            None => Settings::default(),
        };
        let mut flags = Settings::default();
        flags.set_opt("input", self.input.as_ref().map(|p| p.display()));
        flags.set_opt("horizon", self.horizon.as_ref());
        flags.set_opt("mode", self.mode.as_ref());
        flags.set_opt("valid_frac", self.valid_frac);
        flags.set_opt("train_eval_ratio", self.train_eval_ratio.as_ref());
        flags.set_opt("seed", self.seed);
        flags.set_opt("smape_variant", self.smape_variant.as_ref());
        flags.set_opt("epsilon", self.epsilon);
        flags.set_opt("out", self.out.as_ref().map(|p| p.display()));
        flags.set_opt("population_size", self.population_size);
        flags.set_opt("tournament_size", self.tournament_size);
        flags.set_opt("elite_fraction", self.elite_fraction);
        flags.set_opt("stop_no_progress", self.stop_no_progress);
        flags.set_opt("mutation_rate", self.mutation_rate);
        flags.set_opt("mutation_probability", self.mutation_probability);
        if !self.bounds.is_empty() {
            let mut joined = settings.get("bounds").unwrap_or("").to_string();
            for b in &self.bounds {
                if !joined.is_empty() {
                    joined.push(',');
                }
                joined.push_str(b);
            }
            flags.set("bounds", &joined);
        }
        settings.merge(&flags);
        RunConfig::from_settings(&settings)
    }
}

/// `min:max` or a comma list of string lengths.
pub fn parse_int_grid(text: &str) -> Result<Vec<usize>> {
    let bad = || PmbsiError::InvalidConfig(format!("invalid integer grid `{text}`"));
    let values: Vec<usize> = if let Some((a, b)) = text.split_once(':') {
        let a: usize = a.trim().parse().map_err(|_| bad())?;
        let b: usize = b.trim().parse().map_err(|_| bad())?;
        (a..=b).collect()
    } else {
        text.split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?
    };
    if values.is_empty() {
        return Err(bad());
    }
    Ok(values)
}

/// `min:max:count` (evenly spaced, inclusive) or a comma list.
pub fn parse_real_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || PmbsiError::InvalidConfig(format!("invalid grid `{text}`"));
    let parts: Vec<&str> = text.split(':').collect();
    let values: Vec<f64> = match parts.as_slice() {
        [a, b, n] => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            let n: usize = n.trim().parse().map_err(|_| bad())?;
            match n {
                0 => Vec::new(),
                1 => vec![a],
                _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
            }
        }
        [_] => text
            .split(',')
            .map(|s| s.trim().parse().map_err(|_| bad()))
            .collect::<Result<_>>()?,
        _ => return Err(bad()),
    };
    if values.is_empty() || values.iter().any(|v| !v.is_finite()) {
        return Err(bad());
    }
    Ok(values)
}

fn emit(text: &str) -> Result<()> {
    let mut out = std::io::stdout().lock();
    out.write_all(text.as_bytes())?;
    if !text.ends_with('\n') {
        out.write_all(b"\n")?;
    }
    Ok(())
}

fn single_horizon(cfg: &RunConfig) -> Result<usize> {
    match cfg.horizons.as_slice() {
        [h] => Ok(*h),
        _ => Err(PmbsiError::InvalidConfig("this command takes a single --horizon".into())),
    }
}

fn execute(command: Command) -> Result<()> {
    match command {
        Command::Fit(common) => {
            let cfg = common.run_config()?;
            let outcome = commands::cmd_fit(&cfg)?;
            if cfg.out.is_none() {
                emit(&outcome.report.to_json())?;
            }
        }
        Command::Predict { common, model, steps } => {
            let cfg = common.run_config()?;
            let model = ModelFile::load(&model)?;
            let input = cfg
                .input
                .as_deref()
                .ok_or_else(|| PmbsiError::InvalidConfig("--input is required".into()))?;
            let raw = commands::load_series(input)?;
            let values = commands::predict_series(&model, &raw, steps)?;
            let text: String = values.iter().map(|v| format!("{v}\n")).collect();
            match &cfg.out {
                Some(path) => std::fs::write(path, text)?,
                None => emit(&text)?,
            }
        }
        Command::Evaluate { common, model } => {
            let cfg = common.run_config()?;
            let model = ModelFile::load(&model)?;
            let input = cfg
                .input
                .clone()
                .ok_or_else(|| PmbsiError::InvalidConfig("--input is required".into()))?;
            let raw = commands::load_series(&input)?;
            let report = commands::evaluate_series(&model, &raw, &input.display().to_string(), &cfg)?;
            match &cfg.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    std::fs::write(dir.join("evaluate.json"), report.to_json())?;
                    std::fs::write(dir.join("metrics.csv"), report.metrics_csv())?;
                }
                None => emit(&report.to_json())?,
            }
        }
        Command::Scan { common, l_s, q, eta1, eta2 } => {
            let cfg = common.run_config()?;
            single_horizon(&cfg)?;
            let result = commands::cmd_scan(&cfg, &parse_int_grid(&l_s)?, &parse_real_grid(&q)?, (eta1, eta2))?;
            for (l, reason) in &result.skipped {
                eprintln!("skipped l_s = {l}: {reason}");
            }
            match &cfg.out {
                Some(dir) => {
                    std::fs::create_dir_all(dir)?;
                    std::fs::write(dir.join("scan.csv"), result.to_csv())?;
                }
                None => emit(&result.to_csv())?,
            }
        }
        Command::Bench { common, dir } => {
            let cfg = common.run_config()?;
            let horizon = single_horizon(&cfg)?;
            let report = commands::cmd_bench(&dir, horizon, &cfg)?;
            if cfg.out.is_none() {
                emit(&report.to_json())?;
            }
            for s in report.series.iter().filter(|s| s.error.is_some()) {
                eprintln!("{}: {}", s.name, s.error.as_deref().unwrap_or_default());
            }
        }
    }
    Ok(())
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli.command) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
