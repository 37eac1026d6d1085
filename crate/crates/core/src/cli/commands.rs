//! The work behind each subcommand, usable without the argument parser.

use std::collections::btree_map::{BTreeMap, Entry};
use std::fmt::Write as _;
use std::fs;
use std::ops::Range;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use super::report::{
    reference_rank, trace_csv, EvalReport, GaSummary, HorizonReport, ModelFile, SegmentReport,
    SeriesInfo, SplitInfo, Timing, NN5_PUBLISHED_PMBSI, NN5_REFERENCE, TOOL, VERSION,
};
use crate::error::{PmbsiError, Result};
use crate::ga::{evolve, Evolution, EvolutionTrace, GaConfig, ParamBounds};
use crate::invariant::StringParams;
use crate::metrics::{self, SMAPE_NOTE};
use crate::predictor::{
    first_admissible_target, forecast_targets, iterated_path, naive_targets, predict_range, Mode,
};
use crate::series::TimeSeries;

pub fn load_series(path: &Path) -> Result<TimeSeries> {
    let file = fs::File::open(path).map_err(|e| PmbsiError::Io(format!("{}: {e}", path.display())))?;
    TimeSeries::from_csv(file)
}

fn shift(raw: &TimeSeries, epsilon: Option<f64>) -> (TimeSeries, f64) {
    let eps = epsilon.unwrap_or_else(|| raw.default_epsilon());
    (raw.shift_positive(eps), eps)
}

/// Moves the `l_s` search range above the horizon when the configured range
/// lies entirely at or below it, keeping its width.
pub fn bounds_for_horizon(bounds: &ParamBounds, horizon: usize) -> ParamBounds {
    let mut b = *bounds;
    let floor = (horizon + 1) as f64;
    if b.l_s.1.round() < floor {
        let width = b.l_s.1 - b.l_s.0;
        b.l_s = (floor, floor + width);
    }
    b
}

/// The part of `range` whose targets have enough history.
fn scored_targets(range: &Range<usize>, l_s: usize, horizon: usize) -> Result<Range<usize>> {
    let start = range.start.max(first_admissible_target(l_s, horizon));
    if start >= range.end {
        return Err(PmbsiError::SeriesTooShort {
            valid: range.end,
            required: first_admissible_target(l_s, horizon) + 1,
        });
    }
    Ok(start..range.end)
}

fn ga_summary(evo: &Evolution) -> GaSummary {
    GaSummary {
        generations: evo.trace.generation_count(),
        champion_generation: evo.champion_generation,
        train_mae: evo.train_mae,
        eval_mae: evo.eval_mae,
        effective_bounds: evo.trace.effective_bounds,
        best_fitness_by_generation: evo.trace.generations.iter().map(|g| g.best_fitness).collect(),
        champion_eval_mae_by_generation: evo
            .trace
            .generations
            .iter()
            .map(|g| g.champion_eval_mae)
            .collect(),
    }
}

fn score_horizon(
    shifted: &TimeSeries,
    params: &StringParams,
    horizon: usize,
    mode: Mode,
    split: &SplitInfo,
    cfg: &RunConfig,
) -> Result<(SegmentReport, SegmentReport, SegmentReport)> {
    let values = shifted.values();
    let offset = shifted.offset();
    let variant = cfg.smape_variant;
    let eval = forecast_targets(values, params, horizon, scored_targets(&split.eval, params.l_s, horizon)?, mode)?;
    let valid = forecast_targets(values, params, horizon, scored_targets(&split.valid, params.l_s, horizon)?, mode)?;
    let naive = naive_targets(values, horizon, split.valid.clone())?;
    Ok((
        SegmentReport::from_forecasts(&eval, offset, variant)?,
        SegmentReport::from_forecasts(&valid, offset, variant)?,
        SegmentReport::from_forecasts(&naive, offset, variant)?,
    ))
}

/// Result of a `fit` run.
#[derive(Debug, Clone)]
pub struct FitOutcome {
    pub report: EvalReport,
    pub models: Vec<(usize, ModelFile)>,
    pub traces: Vec<(usize, EvolutionTrace)>,
}

/// Shift, split, evolve per horizon, score evaluation and validation segments.
pub fn fit_series(raw: &TimeSeries, input: &str, cfg: &RunConfig) -> Result<FitOutcome> {
    let started = Instant::now();
    let (shifted, epsilon) = shift(raw, cfg.epsilon);
    let bounds = cfg.split.bounds(shifted.len())?;
    let split = SplitInfo {
        train: bounds.train,
        eval: bounds.eval,
        valid: bounds.valid,
    };
    let values = shifted.values();
    let train = &values[split.train.clone()];
    let eval = &values[split.eval.clone()];

    let mut cache: BTreeMap<usize, Evolution> = BTreeMap::new();
    let mut horizons = Vec::new();
    let mut models = Vec::new();
    let mut traces = Vec::new();
    for &horizon in &cfg.horizons {
        let fit_horizon = match cfg.mode {
            Mode::Direct => horizon,
            Mode::Iterated => 1,
        };
        let evo = match cache.entry(fit_horizon) {
            Entry::Occupied(e) => e.into_mut(),
            Entry::Vacant(e) => {
                let ga = GaConfig {
                    bounds: bounds_for_horizon(&cfg.ga.bounds, fit_horizon),
                    ..cfg.ga.clone()
                };
                e.insert(evolve(train, eval, fit_horizon, &ga)?)
            }
        };
        let (eval_rep, valid_rep, naive_rep) =
            score_horizon(&shifted, &evo.params, horizon, cfg.mode, &split, cfg)?;
        horizons.push(HorizonReport {
            horizon,
            mode: cfg.mode,
            params: evo.params,
            ga: Some(ga_summary(evo)),
            eval: eval_rep,
            valid: valid_rep,
            naive_valid: naive_rep,
        });
        models.push((
            horizon,
            ModelFile {
                params: evo.params,
                offset: shifted.offset(),
                mode: cfg.mode,
                seed: cfg.ga.seed,
                bounds: evo.trace.effective_bounds,
                version: VERSION.to_string(),
            },
        ));
        traces.push((horizon, evo.trace.clone()));
    }

    let report = EvalReport {
        tool: TOOL,
        version: VERSION,
        command: "fit",
        input: input.to_string(),
        seed: cfg.ga.seed,
        series: SeriesInfo {
            len: shifted.len(),
            filled: shifted.filled_count(),
            offset: shifted.offset(),
            epsilon,
        },
        split,
        smape_variant: cfg.smape_variant,
        smape_note: SMAPE_NOTE,
        ga_config: Some(cfg.ga.clone()),
        horizons,
        timing: Timing {
            total_secs: started.elapsed().as_secs_f64(),
        },
    };
    Ok(FitOutcome {
        report,
        models,
        traces,
    })
}

fn input_path(cfg: &RunConfig) -> Result<&Path> {
    cfg.input
        .as_deref()
        .ok_or_else(|| PmbsiError::InvalidConfig("--input is required".into()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    fs::write(path, contents).map_err(|e| PmbsiError::Io(format!("{}: {e}", path.display())))
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| PmbsiError::Io(format!("{}: {e}", dir.display())))
}

/// `fit`: runs [`fit_series`] on `--input`. With `--out DIR` it writes
/// `report.json`, `metrics.csv`, `model_h<H>.txt` and `trace_h<H>.csv`.
pub fn cmd_fit(cfg: &RunConfig) -> Result<FitOutcome> {
    let path = input_path(cfg)?;
    let raw = load_series(path)?;
    let outcome = fit_series(&raw, &path.display().to_string(), cfg)?;
    if let Some(dir) = &cfg.out {
        ensure_dir(dir)?;
        write_file(&dir.join("report.json"), &outcome.report.to_json())?;
        write_file(&dir.join("metrics.csv"), &outcome.report.metrics_csv())?;
        for (h, model) in &outcome.models {
            write_file(&dir.join(format!("model_h{h}.txt")), &model.to_text())?;
        }
        for (h, trace) in &outcome.traces {
            write_file(&dir.join(format!("trace_h{h}.csv")), &trace_csv(trace))?;
        }
    }
    Ok(outcome)
}

/// Forecasts the `steps` values following the end of `raw`, on the raw scale.
///
/// A one-step model with `steps > 1` is iterated; otherwise forecasts are
/// direct, which needs `steps <= l_pr` (the k-th value comes from the anchor
/// `l_pr - k` samples before the end).
pub fn predict_series(model: &ModelFile, raw: &TimeSeries, steps: usize) -> Result<Vec<f64>> {
    if steps == 0 {
        return Err(PmbsiError::InvalidConfig("steps must be at least 1".into()));
    }
    let params = &model.params;
    let shifted: Vec<f64> = raw.values().iter().map(|v| v + model.offset).collect();
    if let Some((index, &value)) = shifted.iter().enumerate().find(|(_, v)| v.is_nan() || **v <= 0.0) {
        return Err(PmbsiError::PositivityViolated { index, value });
    }
    let n = shifted.len();
    if n < params.l_s + 1 {
        return Err(PmbsiError::SeriesTooShort {
            valid: n,
            required: params.l_s + 1,
        });
    }
    let forecasts = if params.l_pr == 1 && (steps > 1 || model.mode == Mode::Iterated) {
        iterated_path(&shifted, params, n - 1, steps)?
            .into_iter()
            .map(|f| f.value.unwrap_or(f64::NAN))
            .collect::<Vec<_>>()
    } else {
        if steps > params.l_pr {
            return Err(PmbsiError::InvalidConfig(format!(
                "a direct {}-step model can emit at most {} values",
                params.l_pr, params.l_pr
            )));
        }
        let first = n - params.l_pr;
        if first < params.l_s {
            return Err(PmbsiError::SeriesTooShort {
                valid: n,
                required: params.l_s + params.l_pr,
            });
        }
        predict_range(&shifted, params, first..first + steps)?.values()
    };
    Ok(forecasts.into_iter().map(|f| f - model.offset).collect())
}

/// `evaluate`: scores a stored model on the evaluation and validation
/// segments of a series without refitting.
pub fn evaluate_series(model: &ModelFile, raw: &TimeSeries, input: &str, cfg: &RunConfig) -> Result<EvalReport> {
    let started = Instant::now();
    let shifted = TimeSeries::with_offset(
        raw.values().iter().map(|v| v + model.offset).collect(),
        model.offset,
    );
    if let Some((index, &value)) = shifted.values().iter().enumerate().find(|(_, v)| v.is_nan() || **v <= 0.0) {
        return Err(PmbsiError::PositivityViolated { index, value });
    }
    let bounds = cfg.split.bounds(shifted.len())?;
    let split = SplitInfo {
        train: bounds.train,
        eval: bounds.eval,
        valid: bounds.valid,
    };
    let horizons: Vec<usize> = match model.mode {
        Mode::Direct => vec![model.params.l_pr],
        Mode::Iterated => cfg.horizons.clone(),
    };
    let mut reports = Vec::new();
    for horizon in horizons {
        let (eval, valid, naive_valid) =
            score_horizon(&shifted, &model.params, horizon, model.mode, &split, cfg)?;
        reports.push(HorizonReport {
            horizon,
            mode: model.mode,
            params: model.params,
            ga: None,
            eval,
            valid,
            naive_valid,
        });
    }
    Ok(EvalReport {
        tool: TOOL,
        version: VERSION,
        command: "evaluate",
        input: input.to_string(),
        seed: model.seed,
        series: SeriesInfo {
            len: raw.len(),
            filled: raw.filled_count(),
            offset: model.offset,
            epsilon: 0.0,
        },
        split,
        smape_variant: cfg.smape_variant,
        smape_note: SMAPE_NOTE,
        ga_config: None,
        horizons: reports,
        timing: Timing {
            total_secs: started.elapsed().as_secs_f64(),
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanRow {
    pub l_s: usize,
    pub q: f64,
    pub eval_mae: f64,
    pub n: usize,
}

/// Evaluation-MAE surface over an `(l_s, Q)` grid with fixed homotopy parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanResult {
    pub horizon: usize,
    pub eta1: f64,
    pub eta2: f64,
    pub l_s_values: Vec<usize>,
    pub q_values: Vec<f64>,
    pub rows: Vec<ScanRow>,
    /// String lengths left out of the grid, with the reason.
    pub skipped: Vec<(usize, String)>,
    pub min_row: usize,
}

impl ScanResult {
    pub fn minimum(&self) -> &ScanRow {
        &self.rows[self.min_row]
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("l_s,q,eval_mae,n,is_min\n");
        for (i, r) in self.rows.iter().enumerate() {
            let _ = writeln!(out, "{},{},{},{},{}", r.l_s, r.q, r.eval_mae, r.n, u8::from(i == self.min_row));
        }
        out
    }

    /// Cells strictly below all of their (up to four) grid neighbours.
    pub fn strict_local_minima(&self) -> usize {
        let cols = self.q_values.len();
        let ls_used: Vec<usize> = self.rows.iter().map(|r| r.l_s).collect::<std::collections::BTreeSet<_>>().into_iter().collect();
        let rows = ls_used.len();
        let at = |i: usize, j: usize| self.rows[i * cols + j].eval_mae;
        let mut count = 0;
        for i in 0..rows {
            for j in 0..cols {
                let v = at(i, j);
                let mut neighbours = Vec::with_capacity(4);
                if i > 0 {
                    neighbours.push(at(i - 1, j));
                }
                if i + 1 < rows {
                    neighbours.push(at(i + 1, j));
                }
                if j > 0 {
                    neighbours.push(at(i, j - 1));
                }
                if j + 1 < cols {
                    neighbours.push(at(i, j + 1));
                }
                if !neighbours.is_empty() && neighbours.iter().all(|&n| v < n) {
                    count += 1;
                }
            }
        }
        count
    }
}

/// Evaluates every feasible `(l_s, Q)` cell on the targets in `eval_range`
/// that have enough history for that string length. Cells run in parallel.
pub fn scan_grid(
    values: &[f64],
    horizon: usize,
    l_s_values: &[usize],
    q_values: &[f64],
    eta: (f64, f64),
    eval_range: Range<usize>,
) -> Result<ScanResult> {
    if l_s_values.is_empty() || q_values.is_empty() {
        return Err(PmbsiError::EmptyRange);
    }
    let mut skipped = Vec::new();
    let mut usable = Vec::new();
    for &l_s in l_s_values {
        if l_s <= horizon {
            skipped.push((l_s, format!("l_s = {l_s} does not exceed horizon {horizon}")));
        } else if scored_targets(&eval_range, l_s, horizon).is_err() {
            skipped.push((l_s, format!("l_s = {l_s} leaves no evaluation target with enough history")));
        } else {
            usable.push(l_s);
        }
    }
    if usable.is_empty() {
        return Err(PmbsiError::InvalidConfig("no feasible string length in scan range".into()));
    }
    let cells: Vec<(usize, f64)> = usable
        .iter()
        .flat_map(|&l| q_values.iter().map(move |&q| (l, q)))
        .collect();
    let rows = cells
        .par_iter()
        .map(|&(l_s, q)| -> Result<ScanRow> {
            let params = StringParams::new(l_s, horizon, eta.0, eta.1, q)?;
            let targets = scored_targets(&eval_range, l_s, horizon)?;
            let tf = forecast_targets(values, &params, horizon, targets, Mode::Direct)?;
            Ok(ScanRow {
                l_s,
                q,
                eval_mae: metrics::mae(&tf.actual, &tf.forecast)?,
                n: tf.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let min_row = (0..rows.len())
        .min_by(|&a, &b| rows[a].eval_mae.total_cmp(&rows[b].eval_mae).then(a.cmp(&b)))
        .unwrap();
    Ok(ScanResult {
        horizon,
        eta1: eta.0,
        eta2: eta.1,
        l_s_values: usable,
        q_values: q_values.to_vec(),
        rows,
        skipped,
        min_row,
    })
}

/// `scan`: loads, shifts and splits `--input`, then scans the evaluation segment.
pub fn cmd_scan(cfg: &RunConfig, l_s_values: &[usize], q_values: &[f64], eta: (f64, f64)) -> Result<ScanResult> {
    let raw = load_series(input_path(cfg)?)?;
    let (shifted, _) = shift(&raw, cfg.epsilon);
    let bounds = cfg.split.bounds(shifted.len())?;
    let horizon = cfg.horizons[0];
    scan_grid(shifted.values(), horizon, l_s_values, q_values, eta, bounds.eval)
}

/// Per-series outcome in a batch benchmark.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSeries {
    pub name: String,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub params: Option<StringParams>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub smape: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mae: Option<f64>,
    pub nan_percent: f64,
    pub generations: usize,
    pub actual: Vec<f64>,
    pub forecast: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReferenceEntry {
    pub competitor: &'static str,
    pub smape: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub horizon: usize,
    pub seed: u64,
    pub protocol: &'static str,
    pub smape_variant: metrics::SmapeVariant,
    pub completed: usize,
    pub failed: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_smape: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reference_rank: Option<usize>,
    pub published_pmbsi_smape: f64,
    pub reference: Vec<ReferenceEntry>,
    pub series: Vec<BenchSeries>,
    pub timing: Timing,
}

impl BenchReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn series_csv(&self) -> String {
        let mut out = String::from("name,smape,mae,nan_percent,l_s,eta1,eta2,q,generations,error\n");
        for s in &self.series {
            let num = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
            let (l_s, e1, e2, q) = match s.params {
                Some(p) => (p.l_s.to_string(), p.eta1.to_string(), p.eta2.to_string(), p.q.to_string()),
                None => Default::default(),
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{l_s},{e1},{e2},{q},{},{}",
                s.name,
                num(s.smape),
                num(s.mae),
                s.nan_percent,
                s.generations,
                s.error.as_deref().unwrap_or("").replace(',', ";")
            );
        }
        out
    }
}

pub const BENCH_PROTOCOL: &str = "one GA per series on all but the last `horizon` values (train/eval by ratio); \
direct `horizon`-step model forecasts the held-out tail; seed = base seed + series index in name order";

fn bench_one(raw: &TimeSeries, horizon: usize, cfg: &RunConfig, seed: u64) -> Result<(Evolution, SegmentReport)> {
    let (shifted, _) = shift(raw, cfg.epsilon);
    let n = shifted.len();
    if n <= horizon {
        return Err(PmbsiError::SeriesTooShort {
            valid: n,
            required: horizon + 1,
        });
    }
    let fit_len = n - horizon;
    let (train_r, eval_r) = cfg.split.train_eval_bounds(fit_len)?;
    let values = shifted.values();
    let ga = GaConfig {
        seed,
        bounds: bounds_for_horizon(&cfg.ga.bounds, horizon),
        ..cfg.ga.clone()
    };
    let evo = evolve(&values[train_r], &values[eval_r], horizon, &ga)?;
    let tf = forecast_targets(values, &evo.params, horizon, fit_len..n, Mode::Direct)?;
    let seg = SegmentReport::from_forecasts(&tf, shifted.offset(), cfg.smape_variant)?;
    Ok((evo, seg))
}

/// Runs the benchmark protocol on each `(name, series)` pair independently.
pub fn bench_series(items: &[(String, Result<TimeSeries>)], horizon: usize, cfg: &RunConfig) -> BenchReport {
    let started = Instant::now();
    let series: Vec<BenchSeries> = items
        .par_iter()
        .enumerate()
        .map(|(i, (name, loaded))| {
            let seed = cfg.ga.seed.wrapping_add(i as u64);
            let outcome = loaded
                .clone()
                .and_then(|raw| bench_one(&raw, horizon, cfg, seed));
            match outcome {
                Ok((evo, seg)) => BenchSeries {
                    name: name.clone(),
                    seed,
                    error: None,
                    params: Some(evo.params),
                    smape: Some(seg.metrics.smape),
                    mae: Some(seg.metrics.mae),
                    nan_percent: seg.nan_percent,
                    generations: evo.trace.generation_count(),
                    actual: seg.actual,
                    forecast: seg.forecast,
                },
                Err(e) => BenchSeries {
                    name: name.clone(),
                    seed,
                    error: Some(e.to_string()),
                    params: None,
                    smape: None,
                    mae: None,
                    nan_percent: 0.0,
                    generations: 0,
                    actual: Vec::new(),
                    forecast: Vec::new(),
                },
            }
        })
        .collect();
    let scores: Vec<f64> = series.iter().filter_map(|s| s.smape).collect();
    let mean_smape = (!scores.is_empty()).then(|| scores.iter().sum::<f64>() / scores.len() as f64);
    BenchReport {
        tool: TOOL,
        version: VERSION,
        command: "bench",
        horizon,
        seed: cfg.ga.seed,
        protocol: BENCH_PROTOCOL,
        smape_variant: cfg.smape_variant,
        completed: scores.len(),
        failed: series.len() - scores.len(),
        mean_smape,
        reference_rank: mean_smape.map(reference_rank),
        published_pmbsi_smape: NN5_PUBLISHED_PMBSI,
        reference: NN5_REFERENCE
            .iter()
            .map(|&(competitor, smape)| ReferenceEntry { competitor, smape })
            .collect(),
        series,
        timing: Timing {
            total_secs: started.elapsed().as_secs_f64(),
        },
    }
}

/// Regular, non-hidden files of `dir`, sorted by name.
pub fn list_series_files(dir: &Path) -> Result<Vec<PathBuf>> {
    let mut files: Vec<PathBuf> = fs::read_dir(dir)
        .map_err(|e| PmbsiError::Io(format!("{}: {e}", dir.display())))?
        .filter_map(|entry| entry.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .filter(|p| {
            p.file_name()
                .and_then(|n| n.to_str())
                .is_some_and(|n| !n.starts_with('.'))
        })
        .collect();
    files.sort();
    if files.is_empty() {
        return Err(PmbsiError::InvalidConfig(format!("{} contains no series files", dir.display())));
    }
    Ok(files)
}

/// `bench`: every file in `dir` through [`bench_series`]. With `--out DIR`
/// writes `bench.json` and `bench_series.csv`.
pub fn cmd_bench(dir: &Path, horizon: usize, cfg: &RunConfig) -> Result<BenchReport> {
    let files = list_series_files(dir)?;
    let items: Vec<(String, Result<TimeSeries>)> = files
        .iter()
        .map(|p| {
            let name = p.file_name().unwrap().to_string_lossy().into_owned();
            (name, load_series(p))
        })
        .collect();
    let report = bench_series(&items, horizon, cfg);
    if let Some(out) = &cfg.out {
        ensure_dir(out)?;
        write_file(&out.join("bench.json"), &report.to_json())?;
        write_file(&out.join("bench_series.csv"), &report.series_csv())?;
    }
    Ok(report)
}
