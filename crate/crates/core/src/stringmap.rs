//! Pointwise string maps of a positive series.
//!
//! All maps are evaluated on raw sample slices. Ratios are formed before
//! exponentiation and a ratio of exactly one short-circuits, so the boundary
//! values at `h = 0` (and `h = l_s` for the two-end-point map) are exact zeros.

use crate::error::{PmbsiError, Result};

/// A single evaluated map value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MapPoint {
    pub tau: usize,
    pub h: usize,
    pub value: f64,
}

/// `ratio^q` computed as `exp(q ln ratio)`; exactly 1 when `ratio == 1`.
#[inline]
pub(crate) fn pow_ratio(ratio: f64, q: f64) -> f64 {
    if ratio == 1.0 {
        1.0
    } else {
        (q * ratio.ln()).exp()
    }
}

/// `1 - (num / den)^q` for positive samples.
#[inline]
pub(crate) fn q_return(num: f64, den: f64, q: f64) -> f64 {
    1.0 - pow_ratio(num / den, q)
}

#[inline]
pub(crate) fn sample(series: &[f64], index: usize) -> Result<f64> {
    let value = *series.get(index).ok_or(PmbsiError::WindowOutOfBounds {
        index,
        len: series.len(),
    })?;
    if value > 0.0 {
        Ok(value)
    } else {
        Err(PmbsiError::PositivityViolated { index, value })
    }
}

fn check_q(q: f64) -> Result<()> {
    if q > 0.0 && q.is_finite() {
        Ok(())
    } else {
        Err(PmbsiError::InvalidParams(format!("Q must be positive, got {q}")))
    }
}

/// Linear one-end-point map `(p(tau+h) - p(tau)) / p(tau+h)`.
pub fn p1_map(series: &[f64], tau: usize, h: usize) -> Result<f64> {
    let origin = sample(series, tau)?;
    let end = sample(series, tau + h)?;
    Ok((end - origin) / end)
}

/// Q-deformed one-end-point map `1 - [p(tau)/p(tau+h)]^Q`.
pub fn p1_q_map(series: &[f64], tau: usize, h: usize, q: f64) -> Result<f64> {
    check_q(q)?;
    let origin = sample(series, tau)?;
    let end = sample(series, tau + h)?;
    Ok(q_return(origin, end, q))
}

/// Q-deformed two-end-point map, the product of the trends over
/// `[tau, tau+h]` and `[tau+h, tau+l_s]`.
pub fn p2_q_map(series: &[f64], tau: usize, h: usize, l_s: usize, q: f64) -> Result<f64> {
    check_q(q)?;
    if h > l_s {
        return Err(PmbsiError::InvalidParams(format!(
            "lag {h} exceeds string length {l_s}"
        )));
    }
    let origin = sample(series, tau)?;
    let mid = sample(series, tau + h)?;
    let end = sample(series, tau + l_s)?;
    Ok(q_return(origin, mid, q) * q_return(mid, end, q))
}

/// Evaluates `p2_q_map` for every lag `0..=l_s` at one anchor.
pub fn p2_q_profile(series: &[f64], tau: usize, l_s: usize, q: f64) -> Result<Vec<MapPoint>> {
    (0..=l_s)
        .map(|h| {
            p2_q_map(series, tau, h, l_s, q).map(|value| MapPoint { tau, h, value })
        })
        .collect()
}
