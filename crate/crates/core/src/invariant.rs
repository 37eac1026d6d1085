//! The weighted mixed-string invariant `C(tau, Lambda)` and the auxiliary
//! sums that isolate the sample at `tau + l_s` inside it.

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{PmbsiError, Result};
use crate::stringmap::{pow_ratio, q_return, sample};

/// Free parameters of the string-invariant model.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StringParams {
    /// String length in samples.
    pub l_s: usize,
    /// Prediction horizon in samples.
    pub l_pr: usize,
    pub eta1: f64,
    pub eta2: f64,
    /// Deformation exponent.
    pub q: f64,
}

impl StringParams {
    pub fn new(l_s: usize, l_pr: usize, eta1: f64, eta2: f64, q: f64) -> Result<Self> {
        let params = Self {
            l_s,
            l_pr,
            eta1,
            eta2,
            q,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.l_pr == 0 {
            return Err(PmbsiError::InvalidParams("horizon must be at least 1".into()));
        }
        if self.l_s <= self.l_pr {
            return Err(PmbsiError::InvalidParams(format!(
                "string length {} must exceed horizon {}",
                self.l_s, self.l_pr
            )));
        }
        for (name, eta) in [("eta1", self.eta1), ("eta2", self.eta2)] {
            if !(eta > -1.0 && eta < 1.0) {
                return Err(PmbsiError::InvalidParams(format!(
                    "{name} must lie in (-1, 1), got {eta}"
                )));
            }
        }
        if !(self.q > 0.0 && self.q.is_finite()) {
            return Err(PmbsiError::InvalidParams(format!(
                "Q must be positive, got {}",
                self.q
            )));
        }
        Ok(())
    }

    /// Summation range `Lambda = l_s - l_pr`.
    pub fn lambda(&self) -> usize {
        self.l_s - self.l_pr
    }

    /// Same parameters with a different horizon.
    pub fn with_horizon(&self, l_pr: usize) -> Result<Self> {
        Self::new(self.l_s, l_pr, self.eta1, self.eta2, self.q)
    }
}

/// Bimodal weight table for one `(l_s, l_pr)` pair.
#[derive(Debug, Clone, PartialEq)]
pub struct Weights {
    l_s: usize,
    lambda: usize,
    w0: f64,
    total: f64,
}

impl Weights {
    pub fn new(l_s: usize, l_pr: usize) -> Self {
        let lambda = l_s - l_pr;
        let denom: f64 = (0..=l_s)
            .map(|h| (-(h as f64) / lambda as f64).exp())
            .sum();
        let w0 = 1.0 / denom;
        let mut weights = Self {
            l_s,
            lambda,
            w0,
            total: 0.0,
        };
        // Must match the accumulation order used for the A5 sum.
        let mut total = 0.0;
        for h in 0..=lambda {
            total += weights.at(h);
        }
        weights.total = total;
        weights
    }

    pub fn for_params(params: &StringParams) -> Self {
        Self::new(params.l_s, params.l_pr)
    }

    pub fn w0(&self) -> f64 {
        self.w0
    }

    /// `1 - W0` on the first half of the string (`h <= l_s / 2` as a real
    /// comparison), `W0` beyond it.
    #[inline]
    pub fn at(&self, h: usize) -> f64 {
        if 2 * h <= self.l_s {
            1.0 - self.w0
        } else {
            self.w0
        }
    }

    /// `sum_{h=0}^{Lambda} W(h)`.
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn lambda(&self) -> usize {
        self.lambda
    }
}

pub fn weight(h: usize, params: &StringParams) -> f64 {
    Weights::for_params(params).at(h)
}

/// `C(tau, Lambda)` over the window `tau ..= tau + l_s`.
pub fn compute_c(series: &[f64], tau: usize, params: &StringParams) -> Result<f64> {
    compute_c_with(series, tau, params, &Weights::for_params(params))
}

pub(crate) fn compute_c_with(
    series: &[f64],
    tau: usize,
    params: &StringParams,
    weights: &Weights,
) -> Result<f64> {
    let q = params.q;
    let origin = sample(series, tau)?;
    let end = sample(series, tau + params.l_s)?;

    let mut both = 0.0;
    let mut first = 0.0;
    let mut second = 0.0;
    for h in 0..=params.lambda() {
        let mid = sample(series, tau + h)?;
        let w = weights.at(h);
        let lead = q_return(origin, mid, q);
        let tail = q_return(mid, end, q);
        both += w * lead * tail;
        first += w * lead;
        second += w * tail;
    }

    let (k_both, k_first) = prefactors(params);
    Ok(k_both * both + k_first * first + params.eta2 * second)
}

/// `((1 - eta1)(1 - eta2), eta1 (1 - eta2))`.
#[inline]
fn prefactors(params: &StringParams) -> (f64, f64) {
    let rest = 1.0 - params.eta2;
    ((1.0 - params.eta1) * rest, params.eta1 * rest)
}

/// Auxiliary sums at anchor `tau'`.
///
/// `a2` and `a5` contain `p^Q(tau'+h)` factors; they are stored divided by
/// `scale^Q`, where `scale = p(tau' + Lambda)` is the most recent sample the
/// sums touch. This keeps them dimensionless. [`AuxVariables::a2_raw`] and
/// [`AuxVariables::a5_raw`] give the unscaled values.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AuxVariables {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
    pub a4: f64,
    pub a5: f64,
    /// `C(tau' - l_pr, Lambda)`, the invariant over the last fully observed window.
    pub c_hist: f64,
    pub scale: f64,
    pub q: f64,
}

impl AuxVariables {
    pub fn a2_raw(&self) -> f64 {
        self.a2 * self.scale.powf(self.q)
    }

    pub fn a5_raw(&self) -> f64 {
        self.a5 * self.scale.powf(self.q)
    }

    /// `C(tau', Lambda)` as a function of the unknown end sample `x = p(tau' + l_s)`.
    pub fn reconstruct_c(&self, x: f64) -> f64 {
        self.a1 + self.a3 + self.a4 + (self.a2 + self.a5) * pow_ratio(self.scale / x, self.q)
    }
}

/// Computes the auxiliary variables at `tau_prime`. Only samples up to
/// `tau_prime + Lambda` are visible to the computation.
pub fn compute_aux(series: &[f64], tau_prime: usize, params: &StringParams) -> Result<AuxVariables> {
    compute_aux_with(series, tau_prime, params, &Weights::for_params(params))
}

pub(crate) fn compute_aux_with(
    series: &[f64],
    tau_prime: usize,
    params: &StringParams,
    weights: &Weights,
) -> Result<AuxVariables> {
    let lambda = params.lambda();
    let last = tau_prime + lambda;
    if last >= series.len() {
        return Err(PmbsiError::WindowOutOfBounds {
            index: last,
            len: series.len(),
        });
    }
    if tau_prime < params.l_pr {
        return Err(PmbsiError::WindowOutOfBounds {
            index: 0,
            len: series.len(),
        });
    }
    let history = &series[..=last];
    let q = params.q;

    let c_hist = compute_c_with(history, tau_prime - params.l_pr, params, weights)?;

    let origin = sample(history, tau_prime)?;
    let scale = sample(history, last)?;
    let mut lead_sum = 0.0;
    let mut lead_pow_sum = 0.0;
    let mut pow_sum = 0.0;
    for h in 0..=lambda {
        let mid = sample(history, tau_prime + h)?;
        let w = weights.at(h);
        let lead = q_return(origin, mid, q);
        let rel = pow_ratio(mid / scale, q);
        lead_sum += w * lead;
        lead_pow_sum += w * lead * rel;
        pow_sum += w * rel;
    }

    let (k_both, k_first) = prefactors(params);
    Ok(AuxVariables {
        a1: k_both * lead_sum,
        a2: -k_both * lead_pow_sum,
        a3: k_first * lead_sum,
        a4: params.eta2 * weights.total(),
        a5: -params.eta2 * pow_sum,
        c_hist,
        scale,
        q,
    })
}

/// Summary of `|C(tau) - C(tau + l_pr)|` over a range of anchors.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Drift {
    pub mean: f64,
    pub max: f64,
    pub n: usize,
}

pub fn invariant_drift(series: &[f64], params: &StringParams, range: Range<usize>) -> Result<Drift> {
    if range.is_empty() {
        return Err(PmbsiError::EmptyRange);
    }
    let weights = Weights::for_params(params);
    let mut sum = 0.0;
    let mut max = 0.0f64;
    for tau in range.clone() {
        let now = compute_c_with(series, tau, params, &weights)?;
        let later = compute_c_with(series, tau + params.l_pr, params, &weights)?;
        let d = (now - later).abs();
        sum += d;
        max = max.max(d);
    }
    Ok(Drift {
        mean: sum / range.len() as f64,
        max,
        n: range.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(l_s: usize, l_pr: usize, eta1: f64, eta2: f64, q: f64) -> StringParams {
        StringParams::new(l_s, l_pr, eta1, eta2, q).unwrap()
    }

    #[test]
    fn params_validation() {
        assert!(StringParams::new(3, 3, 0.0, 0.0, 1.0).is_err());
        assert!(StringParams::new(3, 0, 0.0, 0.0, 1.0).is_err());
        assert!(StringParams::new(3, 1, 1.0, 0.0, 1.0).is_err());
        assert!(StringParams::new(3, 1, 0.0, -1.0, 1.0).is_err());
        assert!(StringParams::new(3, 1, 0.0, 0.0, 0.0).is_err());
        assert_eq!(params(5, 2, 0.0, 0.0, 1.0).lambda(), 3);
    }

    #[test]
    fn weight_small_case() {
        // 1 / (1 + e^-1 + e^-2), evaluated by hand.
        let w0 = 1.0 / (1.0 + (-1.0f64).exp() + (-2.0f64).exp());
        assert!((w0 - 0.665_240_955_774_82).abs() < 1e-12);
        let p = params(2, 1, 0.0, 0.0, 1.0);
        assert!((Weights::for_params(&p).w0() - w0).abs() < 1e-15);
        assert!((weight(0, &p) - (1.0 - w0)).abs() < 1e-15);
        assert!((weight(0, &p) - 0.334_759_044_225_18).abs() < 1e-12);
    }

    #[test]
    fn weight_branches() {
        let p = params(4, 1, 0.0, 0.0, 1.0);
        let w = Weights::for_params(&p);
        assert_eq!(w.at(2), 1.0 - w.w0());
        assert_eq!(w.at(3), w.w0());
        // odd string length splits at 2.5
        let w = Weights::new(5, 1);
        assert_eq!(w.at(2), 1.0 - w.w0());
        assert_eq!(w.at(3), w.w0());
    }

    #[test]
    fn weight_takes_two_values() {
        for l_s in 2..30 {
            for l_pr in 1..l_s {
                let w = Weights::new(l_s, l_pr);
                let mut vals: Vec<f64> = (0..=w.lambda()).map(|h| w.at(h)).collect();
                vals.sort_by(f64::total_cmp);
                vals.dedup();
                assert!(vals.len() <= 2);
            }
        }
    }

    #[test]
    fn constant_series_c_is_zero() {
        let s = [3.5; 12];
        let p = params(6, 2, 0.4, -0.3, 2.2);
        assert_eq!(compute_c(&s, 3, &p).unwrap(), 0.0);
    }

    #[test]
    fn no_homotopy_reduces_to_two_end_point_sum() {
        let s = [1.0, 1.4, 0.9, 1.7, 1.2, 2.0, 1.1];
        let p = params(5, 1, 0.0, 0.0, 1.3);
        let w = Weights::for_params(&p);
        let expected: f64 = (0..=p.lambda())
            .map(|h| w.at(h) * crate::stringmap::p2_q_map(&s, 1, h, 5, 1.3).unwrap())
            .sum();
        let got = compute_c(&s, 1, &p).unwrap();
        assert!((got - expected).abs() <= 1e-14 * expected.abs().max(1.0));
    }

    #[test]
    fn aux_constant_series() {
        let c: f64 = 2.5;
        let s = [c; 16];
        let p = params(6, 2, 0.3, 0.7, 1.7);
        let aux = compute_aux(&s, 8, &p).unwrap();
        let total = Weights::for_params(&p).total();
        assert_eq!(aux.a1, 0.0);
        assert_eq!(aux.a3, 0.0);
        assert_eq!(aux.a4, 0.7 * total);
        assert!((aux.a5_raw() + 0.7 * total * c.powf(1.7)).abs() < 1e-12);
    }

    #[test]
    fn aux_prefactor_zeros() {
        let s = [1.0, 1.4, 0.9, 1.7, 1.2, 2.0, 1.1, 1.3, 1.6];
        let aux = compute_aux(&s, 4, &params(4, 1, 0.0, 0.0, 1.1)).unwrap();
        assert_eq!((aux.a3, aux.a4, aux.a5), (0.0, 0.0, 0.0));
        let aux = compute_aux(&s, 4, &params(4, 1, 0.5, 0.0, 1.1)).unwrap();
        assert_eq!((aux.a4, aux.a5), (0.0, 0.0));
    }

    #[test]
    fn aux_never_reads_end_sample() {
        let p = params(5, 2, 0.2, 0.4, 0.8);
        // tau' = 4, Lambda = 3: samples up to index 7 are visible, tau'+l_s = 9.
        let visible = [1.0, 1.2, 1.1, 1.5, 1.3, 1.4, 1.8, 1.6];
        let aux = compute_aux(&visible, 4, &p).unwrap();
        let mut extended = visible.to_vec();
        extended.extend_from_slice(&[-5.0, f64::NAN]);
        assert_eq!(compute_aux(&extended, 4, &p).unwrap(), aux);
    }

    #[test]
    fn aux_reconstructs_c() {
        let s = [1.0, 1.4, 0.9, 1.7, 1.2, 2.0, 1.1, 1.3, 1.6, 0.8, 1.9];
        let p = params(4, 1, 0.3, -0.2, 1.5);
        let tau_p = 5;
        let aux = compute_aux(&s, tau_p, &p).unwrap();
        let direct = compute_c(&s, tau_p, &p).unwrap();
        let rebuilt = aux.reconstruct_c(s[tau_p + p.l_s]);
        assert!((direct - rebuilt).abs() <= 1e-9 * direct.abs().max(1e-300));
    }

    #[test]
    fn aux_bounds() {
        let s = [1.0; 6];
        let p = params(4, 2, 0.0, 0.5, 1.0);
        assert!(compute_aux(&s, 1, &p).is_err());
        assert!(compute_aux(&s, 4, &p).is_err());
        assert!(compute_aux(&s, 3, &p).is_ok());
    }

    #[test]
    fn drift_cases() {
        let p = params(4, 2, 0.1, 0.3, 1.2);
        let flat = [2.0; 20];
        assert_eq!(invariant_drift(&flat, &p, 0..10).unwrap().mean, 0.0);

        let periodic: Vec<f64> = (0..20).map(|i| if i % 2 == 0 { 1.0 } else { 3.0 }).collect();
        let d = invariant_drift(&periodic, &p, 0..10).unwrap();
        assert_eq!(d.max, 0.0);

        let noisy: Vec<f64> = (0..20).map(|i| 2.0 + ((i * 7919) % 13) as f64 / 10.0).collect();
        let d = invariant_drift(&noisy, &p, 0..10).unwrap();
        assert!(d.mean > 0.0 && d.max >= d.mean);
        assert_eq!(d.n, 10);

        assert_eq!(invariant_drift(&noisy, &p, 3..3), Err(PmbsiError::EmptyRange));
        assert!(invariant_drift(&noisy, &p, 10..15).is_err());
    }
}
