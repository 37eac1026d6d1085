//! Flat `key = value` run configuration. Config-file entries are loaded
//! first and command-line flags overwrite them key by key.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::error::{PmbsiError, Result};
use crate::ga::GaConfig;
use crate::metrics::SmapeVariant;
use crate::predictor::Mode;
use crate::series::SplitSpec;

/// Raw settings before interpretation.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    entries: BTreeMap<String, String>,
}

impl Settings {
    /// Parses `key = value` lines; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut settings = Settings::default();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                PmbsiError::InvalidConfig(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            settings.set(key.trim(), value.trim());
        }
        Ok(settings)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| PmbsiError::InvalidConfig(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    /// Keys are normalized so that `valid-frac` and `valid_frac` coincide.
    pub fn set(&mut self, key: &str, value: &str) {
        self.entries.insert(normalize(key), value.to_string());
    }

    pub fn set_opt<T: ToString>(&mut self, key: &str, value: Option<T>) {
        if let Some(v) = value {
            self.set(key, &v.to_string());
        }
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(&normalize(key)).map(String::as_str)
    }

    /// Overlays `other` on top of `self`.
    pub fn merge(&mut self, other: &Settings) {
        for (k, v) in &other.entries {
            self.entries.insert(k.clone(), v.clone());
        }
    }

    fn parsed<T: std::str::FromStr>(&self, key: &str) -> Result<Option<T>> {
        match self.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
                PmbsiError::InvalidConfig(format!("cannot parse {key} = `{raw}`"))
            }),
        }
    }
}

fn normalize(key: &str) -> String {
    key.trim().trim_start_matches("--").replace('-', "_")
}

/// Everything a fit/evaluate/scan/bench run needs.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub input: Option<PathBuf>,
    pub horizons: Vec<usize>,
    pub mode: Mode,
    pub split: SplitSpec,
    pub ga: GaConfig,
    pub smape_variant: SmapeVariant,
    pub epsilon: Option<f64>,
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: None,
            horizons: vec![1],
            mode: Mode::Direct,
            split: SplitSpec::default(),
            ga: GaConfig::default(),
            smape_variant: SmapeVariant::Standard,
            epsilon: None,
            out: None,
        }
    }
}

impl RunConfig {
    pub fn from_settings(settings: &Settings) -> Result<Self> {
        let mut cfg = RunConfig {
            input: settings.get("input").map(PathBuf::from),
            out: settings.get("out").map(PathBuf::from),
            ..RunConfig::default()
        };
        if let Some(h) = settings.get("horizon") {
            cfg.horizons = parse_horizons(h)?;
        }
        if let Some(mode) = settings.get("mode") {
            cfg.mode = mode.parse()?;
        }
        if let Some(v) = settings.parsed::<f64>("valid_frac")? {
            cfg.split.valid_fraction = v;
        }
        if let Some(r) = settings.get("train_eval_ratio") {
            cfg.split.train_eval_ratio = parse_ratio(r)?;
        }
        if let Some(v) = settings.get("smape_variant") {
            cfg.smape_variant = v.parse()?;
        }
        cfg.epsilon = settings.parsed("epsilon")?;
        if matches!(cfg.epsilon, Some(e) if e.is_nan() || e <= 0.0) {
            return Err(PmbsiError::InvalidConfig("epsilon must be positive".into()));
        }

        let ga = &mut cfg.ga;
        if let Some(v) = settings.parsed("seed")? {
            ga.seed = v;
        }
        if let Some(v) = settings.parsed("population_size")? {
            ga.population_size = v;
        }
        if let Some(v) = settings.parsed("tournament_size")? {
            ga.tournament_size = v;
        }
        if let Some(v) = settings.parsed("elite_fraction")? {
            ga.elite_fraction = v;
        }
        if let Some(v) = settings.parsed("stop_no_progress")? {
            ga.stop_no_progress = v;
        }
        if let Some(v) = settings.parsed("mutation_rate")? {
            ga.mutation_rate_initial = v;
        }
        if let Some(v) = settings.parsed("mutation_probability")? {
            ga.mutation_probability = v;
        }
        if let Some(spec) = settings.get("bounds") {
            for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
                let (name, range) = parse_bound(item)?;
                ga.bounds.set(&name, range.0, range.1)?;
            }
        }
        for name in ["l_s", "eta1", "eta2", "q"] {
            if let Some(range) = settings.get(&format!("bounds.{name}")) {
                let (lo, hi) = parse_range(range)?;
                ga.bounds.set(name, lo, hi)?;
            }
        }
        Ok(cfg)
    }
}

pub fn parse_horizons(text: &str) -> Result<Vec<usize>> {
    let horizons = text
        .split(',')
        .map(|h| {
            h.trim()
                .parse::<usize>()
                .ok()
                .filter(|&h| h >= 1)
                .ok_or_else(|| PmbsiError::InvalidConfig(format!("invalid horizon `{h}`")))
        })
        .collect::<Result<Vec<_>>>()?;
    if horizons.is_empty() {
        return Err(PmbsiError::InvalidConfig("no horizon given".into()));
    }
    Ok(horizons)
}

/// `6:4` or `6/4`.
pub fn parse_ratio(text: &str) -> Result<(f64, f64)> {
    let (a, b) = text
        .split_once([':', '/'])
        .ok_or_else(|| PmbsiError::InvalidConfig(format!("invalid ratio `{text}`")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| PmbsiError::InvalidConfig(format!("invalid ratio `{text}`")))
    };
    Ok((parse(a)?, parse(b)?))
}

/// `min:max`.
pub fn parse_range(text: &str) -> Result<(f64, f64)> {
    let (a, b) = text
        .split_once(':')
        .ok_or_else(|| PmbsiError::InvalidConfig(format!("invalid range `{text}`, expected min:max")))?;
    let parse = |s: &str| {
        s.trim()
            .parse::<f64>()
            .map_err(|_| PmbsiError::InvalidConfig(format!("invalid range `{text}`")))
    };
    Ok((parse(a)?, parse(b)?))
}

/// `param=min:max`.
pub fn parse_bound(text: &str) -> Result<(String, (f64, f64))> {
    let (name, range) = text
        .split_once('=')
        .ok_or_else(|| PmbsiError::InvalidConfig(format!("invalid bound `{text}`, expected param=min:max")))?;
    Ok((name.trim().to_string(), parse_range(range)?))
}
