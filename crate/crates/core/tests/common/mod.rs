//! Shared fixtures and an independent reference implementation of the
//! invariant and the forecast, written directly from the defining sums.

#![allow(dead_code)]

use std::f64::consts::PI;

use pmbsi::cli::config::RunConfig;
use pmbsi::{Mode, SplitSpec};

/// One period of a sine wave, 51 samples including both ends.
pub fn sinusoid() -> Vec<f64> {
    (0..=50).map(|k| (2.0 * PI * k as f64 / 50.0).sin()).collect()
}

/// Writes [`sinusoid`] as a one-column CSV file.
pub fn sinusoid_csv(dir: &std::path::Path) -> std::path::PathBuf {
    let path = dir.join("sinusoid.csv");
    let text: String = sinusoid().iter().map(|v| format!("{v}\n")).collect();
    std::fs::write(&path, text).unwrap();
    path
}

/// Positive half (26 samples) split 6:4 into train/eval, negative half validation.
pub fn sinusoid_config(horizons: &[usize], mode: Mode, seed: u64) -> RunConfig {
    let mut cfg = RunConfig {
        horizons: horizons.to_vec(),
        mode,
        split: SplitSpec::new(0.49, (6.0, 4.0)).unwrap(),
        ..RunConfig::default()
    };
    cfg.ga.seed = seed;
    cfg
}

pub fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

pub fn rel_diff(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

/// Reference weight: `1 - W0` for `h <= l_s / 2`, `W0` otherwise, with
/// `W0 = 1 / sum_{h'=0}^{l_s} exp(-h' / Lambda)`.
pub fn oracle_weight(h: usize, l_s: usize, l_pr: usize) -> f64 {
    let lambda = (l_s - l_pr) as f64;
    let mut denom = 0.0;
    for k in 0..=l_s {
        denom += (-(k as f64) / lambda).exp();
    }
    let w0 = 1.0 / denom;
    if (h as f64) <= l_s as f64 / 2.0 {
        1.0 - w0
    } else {
        w0
    }
}

#[derive(Debug, Clone, Copy)]
pub struct Params {
    pub l_s: usize,
    pub l_pr: usize,
    pub eta1: f64,
    pub eta2: f64,
    pub q: f64,
}

/// Invariant at `tau`, term by term.
pub fn oracle_c(p: &[f64], tau: usize, m: &Params) -> f64 {
    let lambda = m.l_s - m.l_pr;
    let (mut s1, mut s2, mut s3) = (0.0, 0.0, 0.0);
    for h in 0..=lambda {
        let w = oracle_weight(h, m.l_s, m.l_pr);
        let lead = 1.0 - (p[tau] / p[tau + h]).powf(m.q);
        let tail = 1.0 - (p[tau + h] / p[tau + m.l_s]).powf(m.q);
        s1 += w * lead * tail;
        s2 += w * lead;
        s3 += w * tail;
    }
    (1.0 - m.eta1) * (1.0 - m.eta2) * s1 + m.eta1 * (1.0 - m.eta2) * s2 + m.eta2 * s3
}

/// Unscaled auxiliary sums `A1..A5` at `tau`.
pub fn oracle_aux(p: &[f64], tau: usize, m: &Params) -> [f64; 5] {
    let lambda = m.l_s - m.l_pr;
    let k12 = (1.0 - m.eta1) * (1.0 - m.eta2);
    let k3 = m.eta1 * (1.0 - m.eta2);
    let mut a = [0.0; 5];
    for h in 0..=lambda {
        let w = oracle_weight(h, m.l_s, m.l_pr);
        let lead = 1.0 - (p[tau] / p[tau + h]).powf(m.q);
        let pq = p[tau + h].powf(m.q);
        a[0] += k12 * w * lead;
        a[1] -= k12 * w * lead * pq;
        a[2] += k3 * w * lead;
        a[3] += m.eta2 * w;
        a[4] -= m.eta2 * w * pq;
    }
    a
}

/// Forecast of `p(tau0 + l_pr)` from the closed-form solution, or `None`
/// when the root is undefined.
pub fn oracle_forecast(p: &[f64], tau0: usize, m: &Params) -> Option<f64> {
    let tau_prime = tau0 - (m.l_s - m.l_pr);
    let a = oracle_aux(p, tau_prime, m);
    let c = oracle_c(p, tau0 - m.l_s, m);
    let ratio = (a[1] + a[4]) / (c - a[0] - a[2] - a[3]);
    (ratio > 0.0).then(|| ratio.powf(1.0 / m.q)).filter(|x| x.is_finite())
}
