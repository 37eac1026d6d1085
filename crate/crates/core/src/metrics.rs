//! Error measures used for fitness and reporting.
//!
//! Two SMAPE variants are provided. The literal variant,
//! `(100/n) sum 0.5 |A-F| / (|A|+|F|)`, is bounded by 50 and equals exactly a
//! quarter of the standard variant. Published SMAPE figures above 50
//! (e.g. 54.303315 for a three-step sinusoid forecast) are only reachable
//! with the standard definition, so it is the default.

use serde::{Deserialize, Serialize};

use crate::error::{PmbsiError, Result};

/// Explanation attached to reports next to the chosen SMAPE variant.
pub const SMAPE_NOTE: &str = "standard SMAPE (|A-F| / ((|A|+|F|)/2)) is the default: the literal \
0.5*|A-F|/(|A|+|F|) form is capped at 50, so reference values such as 54.303315 require the \
standard form; literal = standard / 4";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SmapeVariant {
    #[default]
    Standard,
    Literal,
}

impl std::str::FromStr for SmapeVariant {
    type Err = PmbsiError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "standard" => Ok(SmapeVariant::Standard),
            "literal" => Ok(SmapeVariant::Literal),
            other => Err(PmbsiError::InvalidConfig(format!(
                "unknown SMAPE variant `{other}`"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorSummary {
    pub mae: f64,
    pub smape: f64,
    pub n: usize,
}

fn check(actual: &[f64], forecast: &[f64]) -> Result<()> {
    if actual.len() != forecast.len() {
        return Err(PmbsiError::LengthMismatch {
            actual: actual.len(),
            forecast: forecast.len(),
        });
    }
    if actual.is_empty() {
        return Err(PmbsiError::EmptyInput);
    }
    Ok(())
}

pub fn mae(actual: &[f64], forecast: &[f64]) -> Result<f64> {
    check(actual, forecast)?;
    let sum: f64 = actual
        .iter()
        .zip(forecast)
        .map(|(a, f)| (a - f).abs())
        .sum();
    Ok(sum / actual.len() as f64)
}

/// SMAPE in percent. Pairs with `|A| + |F| = 0` contribute zero.
pub fn smape(actual: &[f64], forecast: &[f64], variant: SmapeVariant) -> Result<f64> {
    check(actual, forecast)?;
    let sum: f64 = actual
        .iter()
        .zip(forecast)
        .map(|(a, f)| {
            let denom = a.abs() + f.abs();
            if denom == 0.0 {
                return 0.0;
            }
            match variant {
                SmapeVariant::Standard => (a - f).abs() / (denom / 2.0),
                SmapeVariant::Literal => 0.5 * (a - f).abs() / denom,
            }
        })
        .sum();
    Ok(100.0 * sum / actual.len() as f64)
}

pub fn summarize(actual: &[f64], forecast: &[f64], variant: SmapeVariant) -> Result<ErrorSummary> {
    Ok(ErrorSummary {
        mae: mae(actual, forecast)?,
        smape: smape(actual, forecast, variant)?,
        n: actual.len(),
    })
}
