//! Report documents, the model file format and the competition reference table.

use std::fmt::Write as _;
use std::ops::Range;
use std::path::Path;

use serde::Serialize;

use crate::error::{PmbsiError, Result};
use crate::ga::{GaConfig, ParamBounds};
use crate::invariant::StringParams;
use crate::metrics::{self, ErrorSummary, SmapeVariant};
use crate::predictor::{Mode, TargetForecasts};

pub const TOOL: &str = "pmbsi";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Forecasts and metrics for one block of targets, on the raw data scale.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SegmentReport {
    pub targets: Range<usize>,
    pub metrics: ErrorSummary,
    /// Share of forecasts that were undefined and substituted, in percent.
    pub nan_percent: f64,
    pub actual: Vec<f64>,
    pub forecast: Vec<f64>,
}

impl SegmentReport {
    /// Unshifts `tf` by `offset` and scores it.
    pub fn from_forecasts(tf: &TargetForecasts, offset: f64, variant: SmapeVariant) -> Result<Self> {
        let actual: Vec<f64> = tf.actual.iter().map(|a| a - offset).collect();
        let forecast: Vec<f64> = tf.forecast.iter().map(|f| f - offset).collect();
        let metrics = metrics::summarize(&actual, &forecast, variant)?;
        if !(metrics.mae.is_finite() && metrics.smape.is_finite()) {
            return Err(PmbsiError::Numerical(format!(
                "non-finite error on targets {:?}",
                tf.targets
            )));
        }
        Ok(Self {
            targets: tf.targets.clone(),
            metrics,
            nan_percent: tf.substitution_rate(),
            actual,
            forecast,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaSummary {
    pub generations: usize,
    pub champion_generation: usize,
    pub train_mae: f64,
    pub eval_mae: f64,
    pub effective_bounds: ParamBounds,
    pub best_fitness_by_generation: Vec<f64>,
    pub champion_eval_mae_by_generation: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HorizonReport {
    pub horizon: usize,
    pub mode: Mode,
    pub params: StringParams,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ga: Option<GaSummary>,
    pub eval: SegmentReport,
    pub valid: SegmentReport,
    pub naive_valid: SegmentReport,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SeriesInfo {
    pub len: usize,
    pub filled: usize,
    pub offset: f64,
    pub epsilon: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SplitInfo {
    pub train: Range<usize>,
    pub eval: Range<usize>,
    pub valid: Range<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Timing {
    pub total_secs: f64,
}

/// Report written by `fit` and `evaluate`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EvalReport {
    pub tool: &'static str,
    pub version: &'static str,
    pub command: &'static str,
    pub input: String,
    pub seed: u64,
    pub series: SeriesInfo,
    pub split: SplitInfo,
    pub smape_variant: SmapeVariant,
    pub smape_note: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub ga_config: Option<GaConfig>,
    pub horizons: Vec<HorizonReport>,
    pub timing: Timing,
}

impl EvalReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// CSV table with one row per horizon.
    pub fn metrics_csv(&self) -> String {
        let mut out = String::from(
            "horizon,mode,l_s,eta1,eta2,q,mae_eval,mae_valid,smape_valid,nan_percent_valid,naive_mae_valid,naive_smape_valid\n",
        );
        for h in &self.horizons {
            let mode = match h.mode {
                Mode::Direct => "direct",
                Mode::Iterated => "iterated",
            };
            let _ = writeln!(
                out,
                "{},{},{},{},{},{},{},{},{},{},{},{}",
                h.horizon,
                mode,
                h.params.l_s,
                h.params.eta1,
                h.params.eta2,
                h.params.q,
                h.eval.metrics.mae,
                h.valid.metrics.mae,
                h.valid.metrics.smape,
                h.valid.nan_percent,
                h.naive_valid.metrics.mae,
                h.naive_valid.metrics.smape
            );
        }
        out
    }
}

/// Per-generation GA trace as CSV.
pub fn trace_csv(trace: &crate::ga::EvolutionTrace) -> String {
    let mut out = String::from("generation,best_fitness,mean_fitness,champion_eval_mae,mutation_rate,l_s,eta1,eta2,q\n");
    for g in &trace.generations {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            g.generation,
            g.best_fitness,
            g.mean_fitness,
            g.champion_eval_mae,
            g.mutation_rate,
            g.champion.l_s,
            g.champion.eta1,
            g.champion.eta2,
            g.champion.q
        );
    }
    out
}

/// Everything needed to reproduce forecasts: parameters, offset and provenance.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub params: StringParams,
    pub offset: f64,
    pub mode: Mode,
    pub seed: u64,
    pub bounds: ParamBounds,
    pub version: String,
}

impl ModelFile {
    pub fn to_text(&self) -> String {
        let mode = match self.mode {
            Mode::Direct => "direct",
            Mode::Iterated => "iterated",
        };
        let b = &self.bounds;
        format!(
            "# {TOOL} model\nversion = {}\nl_s = {}\nl_pr = {}\neta1 = {}\neta2 = {}\nq = {}\noffset = {}\nmode = {mode}\nseed = {}\nbounds.l_s = {}:{}\nbounds.eta1 = {}:{}\nbounds.eta2 = {}:{}\nbounds.q = {}:{}\n",
            self.version,
            self.params.l_s,
            self.params.l_pr,
            self.params.eta1,
            self.params.eta2,
            self.params.q,
            self.offset,
            self.seed,
            b.l_s.0,
            b.l_s.1,
            b.eta1.0,
            b.eta1.1,
            b.eta2.0,
            b.eta2.1,
            b.q.0,
            b.q.1,
        )
    }

    pub fn parse(text: &str) -> Result<Self> {
        let settings = super::config::Settings::parse(text)?;
        let field = |key: &str| {
            settings
                .get(key)
                .ok_or_else(|| PmbsiError::Parse(format!("model file lacks `{key}`")))
        };
        let num = |key: &str| -> Result<f64> {
            field(key)?
                .parse()
                .map_err(|_| PmbsiError::Parse(format!("model file: bad `{key}`")))
        };
        let int = |key: &str| -> Result<usize> {
            field(key)?
                .parse()
                .map_err(|_| PmbsiError::Parse(format!("model file: bad `{key}`")))
        };
        let params = StringParams::new(int("l_s")?, int("l_pr")?, num("eta1")?, num("eta2")?, num("q")?)?;
        let mut bounds = ParamBounds::default();
        for name in ["l_s", "eta1", "eta2", "q"] {
            if let Some(range) = settings.get(&format!("bounds.{name}")) {
                let (lo, hi) = super::config::parse_range(range)?;
                bounds.set(name, lo, hi)?;
            }
        }
        Ok(Self {
            params,
            offset: num("offset")?,
            mode: settings.get("mode").unwrap_or("direct").parse()?,
            seed: settings
                .get("seed")
                .map(|s| s.parse().map_err(|_| PmbsiError::Parse("model file: bad `seed`".into())))
                .transpose()?
                .unwrap_or(0),
            bounds,
            version: settings.get("version").unwrap_or("unknown").to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PmbsiError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}

/// Average SMAPE of the ranked entries of the 2008 NN5 competition.
pub const NN5_REFERENCE: [(&str, f64); 27] = [
    ("Wildi", 19.9),
    ("Andrawis", 20.4),
    ("Vogel", 20.5),
    ("D'yakonov", 20.6),
    ("Noncheva", 21.1),
    ("Rauch", 21.7),
    ("Luna", 21.8),
    ("Lagoo", 21.9),
    ("Wichard", 22.1),
    ("Gao", 22.3),
    ("Puma-Villanueva", 23.7),
    ("Autobox(Reilly)", 24.1),
    ("Lewicke", 24.5),
    ("Brentnall", 24.8),
    ("Dang", 25.3),
    ("Pasero", 25.3),
    ("Adeodato", 25.3),
    ("not published", 26.8),
    ("not published", 27.3),
    ("Tung", 28.1),
    ("Naive Seasonal", 28.8),
    ("not published", 33.1),
    ("not published", 36.3),
    ("not published", 41.3),
    ("not published", 45.4),
    ("naive Level", 48.4),
    ("not published", 53.5),
];

/// Published average SMAPE of the string-invariant model on the same corpus.
pub const NN5_PUBLISHED_PMBSI: f64 = 38.8;

/// 1-based position a mean SMAPE would take among the reference entries.
pub fn reference_rank(mean_smape: f64) -> usize {
    1 + NN5_REFERENCE.iter().filter(|(_, s)| *s < mean_smape).count()
}
