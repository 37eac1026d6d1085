//! Closed-form forecasts, the undefined-forecast substitution policy,
//! iterated multi-step prediction and the naive baseline.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{PmbsiError, Result};
use crate::invariant::{compute_aux_with, StringParams, Weights};

/// Denominators with magnitude below this are treated as zero.
pub const DENOMINATOR_EPS: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Substitution {
    None,
    NaiveFallback,
    LastValidFallback,
}

/// A forecast for `horizon` steps ahead. `value` is `None` while the model
/// output is undefined and no substitution has been applied.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Forecast {
    pub horizon: usize,
    pub value: Option<f64>,
    pub substituted: Substitution,
}

impl Forecast {
    pub fn defined(horizon: usize, value: f64) -> Self {
        Self {
            horizon,
            value: Some(value),
            substituted: Substitution::None,
        }
    }

    pub fn undefined(horizon: usize) -> Self {
        Self {
            horizon,
            value: None,
            substituted: Substitution::None,
        }
    }

    pub fn is_defined(&self) -> bool {
        self.value.is_some()
    }

    pub fn was_substituted(&self) -> bool {
        self.substituted != Substitution::None
    }
}

/// Direct forecast of `p(tau0 + l_pr)` from samples at indices `<= tau0`.
///
/// Returns an undefined forecast when the denominator vanishes, the ratio
/// under the `1/Q` root is not positive, or the result is not finite.
/// Insufficient history is an error, not an undefined forecast.
pub fn predict_one(series: &[f64], tau0: usize, params: &StringParams) -> Result<Forecast> {
    predict_one_with(series, tau0, params, &Weights::for_params(params))
}

pub(crate) fn predict_one_with(
    series: &[f64],
    tau0: usize,
    params: &StringParams,
    weights: &Weights,
) -> Result<Forecast> {
    if tau0 >= series.len() {
        return Err(PmbsiError::WindowOutOfBounds {
            index: tau0,
            len: series.len(),
        });
    }
    if tau0 < params.l_s {
        return Err(PmbsiError::WindowOutOfBounds {
            index: 0,
            len: tau0 + 1,
        });
    }
    let history = &series[..=tau0];
    let aux = compute_aux_with(history, tau0 - params.lambda(), params, weights)?;

    let numerator = aux.a2 + aux.a5;
    let denominator = aux.c_hist - aux.a1 - aux.a3 - aux.a4;
    if denominator.is_nan() || denominator.abs() < DENOMINATOR_EPS {
        return Ok(Forecast::undefined(params.l_pr));
    }
    let ratio = numerator / denominator;
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Ok(Forecast::undefined(params.l_pr));
    }
    let root = if ratio == 1.0 {
        1.0
    } else {
        (ratio.ln() / params.q).exp()
    };
    let value = aux.scale * root;
    if value.is_finite() && value > 0.0 {
        Ok(Forecast::defined(params.l_pr, value))
    } else {
        Ok(Forecast::undefined(params.l_pr))
    }
}

/// Forecasts for a run of anchors `tau0s`, with undefined outputs replaced:
/// horizon 1 falls back to `p(tau0)`, longer horizons to the most recent
/// defined forecast of this run (or `p(tau0)` if there is none yet).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RangeForecast {
    pub anchors: Range<usize>,
    pub forecasts: Vec<Forecast>,
}

impl RangeForecast {
    /// Resolved forecast values, aligned with `anchors`.
    pub fn values(&self) -> Vec<f64> {
        self.forecasts.iter().map(|f| f.value.unwrap_or(f64::NAN)).collect()
    }

    pub fn substituted(&self) -> usize {
        self.forecasts.iter().filter(|f| f.was_substituted()).count()
    }

    /// Share of substituted forecasts, in percent.
    pub fn substitution_rate(&self) -> f64 {
        if self.forecasts.is_empty() {
            0.0
        } else {
            100.0 * self.substituted() as f64 / self.forecasts.len() as f64
        }
    }
}

pub fn predict_range(series: &[f64], params: &StringParams, tau0s: Range<usize>) -> Result<RangeForecast> {
    let weights = Weights::for_params(params);
    let mut forecasts = Vec::with_capacity(tau0s.len());
    let mut last_valid: Option<f64> = None;
    for tau0 in tau0s.clone() {
        let mut f = predict_one_with(series, tau0, params, &weights)?;
        match f.value {
            Some(v) => last_valid = Some(v),
            None => {
                let (value, reason) = match (params.l_pr, last_valid) {
                    (1, _) | (_, None) => (series[tau0], Substitution::NaiveFallback),
                    (_, Some(v)) => (v, Substitution::LastValidFallback),
                };
                f.value = Some(value);
                f.substituted = reason;
            }
        }
        forecasts.push(f);
    }
    Ok(RangeForecast {
        anchors: tau0s,
        forecasts,
    })
}

/// Applies a one-step model `steps` times, appending each forecast to a
/// working copy of the history ending at `tau0`. Undefined steps fall back
/// to the last value of the working copy.
pub fn iterated_predict(
    series: &[f64],
    params_1step: &StringParams,
    tau0: usize,
    steps: usize,
) -> Result<Forecast> {
    iterated_predict_with(series, params_1step, tau0, steps, &Weights::for_params(params_1step))
}

fn iterated_predict_with(
    series: &[f64],
    params: &StringParams,
    tau0: usize,
    steps: usize,
    weights: &Weights,
) -> Result<Forecast> {
    let path = iterated_path_with(series, params, tau0, steps, weights)?;
    let substituted = path
        .iter()
        .map(|f| f.substituted)
        .find(|s| *s != Substitution::None)
        .unwrap_or(Substitution::None);
    Ok(Forecast {
        horizon: steps,
        value: path.last().and_then(|f| f.value),
        substituted,
    })
}

/// Every intermediate forecast of an iterated run: element `k` is the
/// `k + 1`-step-ahead value.
pub fn iterated_path(
    series: &[f64],
    params_1step: &StringParams,
    tau0: usize,
    steps: usize,
) -> Result<Vec<Forecast>> {
    iterated_path_with(series, params_1step, tau0, steps, &Weights::for_params(params_1step))
}

fn iterated_path_with(
    series: &[f64],
    params: &StringParams,
    tau0: usize,
    steps: usize,
    weights: &Weights,
) -> Result<Vec<Forecast>> {
    if params.l_pr != 1 {
        return Err(PmbsiError::InvalidParams(format!(
            "iterated prediction needs a one-step model, got horizon {}",
            params.l_pr
        )));
    }
    if steps == 0 {
        return Err(PmbsiError::InvalidParams("steps must be at least 1".into()));
    }
    if tau0 >= series.len() {
        return Err(PmbsiError::WindowOutOfBounds {
            index: tau0,
            len: series.len(),
        });
    }
    let mut work = Vec::with_capacity(tau0 + 1 + steps);
    work.extend_from_slice(&series[..=tau0]);
    let mut path = Vec::with_capacity(steps);
    for step in 1..=steps {
        let anchor = work.len() - 1;
        let f = predict_one_with(&work, anchor, params, weights)?;
        let (value, substituted) = match f.value {
            Some(v) => (v, Substitution::None),
            None => (work[anchor], Substitution::NaiveFallback),
        };
        work.push(value);
        path.push(Forecast {
            horizon: step,
            value: Some(value),
            substituted,
        });
    }
    Ok(path)
}

/// Persistence forecast: `p(tau0)` for every horizon.
pub fn naive_forecast(series: &[f64], tau0: usize, _l_pr: usize) -> Result<f64> {
    series.get(tau0).copied().ok_or(PmbsiError::WindowOutOfBounds {
        index: tau0,
        len: series.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Direct,
    Iterated,
}

impl std::str::FromStr for Mode {
    type Err = PmbsiError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "direct" => Ok(Mode::Direct),
            "iterated" => Ok(Mode::Iterated),
            other => Err(PmbsiError::InvalidConfig(format!("unknown mode `{other}`"))),
        }
    }
}

/// Forecasts aligned with a block of target indices.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TargetForecasts {
    pub targets: Range<usize>,
    pub actual: Vec<f64>,
    pub forecast: Vec<f64>,
    pub substituted: usize,
}

impl TargetForecasts {
    pub fn len(&self) -> usize {
        self.actual.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actual.is_empty()
    }

    pub fn substitution_rate(&self) -> f64 {
        if self.actual.is_empty() {
            0.0
        } else {
            100.0 * self.substituted as f64 / self.actual.len() as f64
        }
    }
}

/// First target index that has enough history for `horizon`-step
/// forecasts with string length `l_s`.
pub fn first_admissible_target(l_s: usize, horizon: usize) -> usize {
    l_s + horizon
}

/// Forecasts each target `t` in `targets` from history ending at
/// `t - horizon`. Direct mode needs `params.l_pr == horizon`, iterated mode
/// a one-step model.
pub fn forecast_targets(
    series: &[f64],
    params: &StringParams,
    horizon: usize,
    targets: Range<usize>,
    mode: Mode,
) -> Result<TargetForecasts> {
    if targets.is_empty() {
        return Err(PmbsiError::EmptyRange);
    }
    if targets.end > series.len() {
        return Err(PmbsiError::WindowOutOfBounds {
            index: targets.end - 1,
            len: series.len(),
        });
    }
    if targets.start < first_admissible_target(params.l_s, horizon) {
        return Err(PmbsiError::WindowOutOfBounds {
            index: 0,
            len: targets.start.saturating_sub(horizon) + 1,
        });
    }
    let anchors = targets.start - horizon..targets.end - horizon;
    let (forecast, substituted) = match mode {
        Mode::Direct => {
            if params.l_pr != horizon {
                return Err(PmbsiError::InvalidParams(format!(
                    "model horizon {} does not match requested horizon {horizon}",
                    params.l_pr
                )));
            }
            let run = predict_range(series, params, anchors)?;
            (run.values(), run.substituted())
        }
        Mode::Iterated => {
            let weights = Weights::for_params(params);
            let mut values = Vec::with_capacity(anchors.len());
            let mut substituted = 0;
            for tau0 in anchors {
                let f = iterated_predict_with(series, params, tau0, horizon, &weights)?;
                substituted += usize::from(f.was_substituted());
                values.push(f.value.unwrap_or(f64::NAN));
            }
            (values, substituted)
        }
    };
    Ok(TargetForecasts {
        actual: series[targets.clone()].to_vec(),
        targets,
        forecast,
        substituted,
    })
}

/// Naive forecasts for the same targets.
pub fn naive_targets(series: &[f64], horizon: usize, targets: Range<usize>) -> Result<TargetForecasts> {
    if targets.is_empty() {
        return Err(PmbsiError::EmptyRange);
    }
    if targets.start < horizon || targets.end > series.len() {
        return Err(PmbsiError::WindowOutOfBounds {
            index: targets.end.saturating_sub(1),
            len: series.len(),
        });
    }
    let forecast = targets
        .clone()
        .map(|t| naive_forecast(series, t - horizon, horizon))
        .collect::<Result<Vec<_>>>()?;
    Ok(TargetForecasts {
        actual: series[targets.clone()].to_vec(),
        targets,
        forecast,
        substituted: 0,
    })
}
