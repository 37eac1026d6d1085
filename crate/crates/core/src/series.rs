//! Time-series ingestion, positivity shifting and chronological splitting.

use std::io::Read;
use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::error::{PmbsiError, Result};

/// Minimum length of a loaded series, counting filled samples.
pub const MIN_SERIES_LEN: usize = 3;

/// Minimum number of observed (non-missing) samples.
pub const MIN_OBSERVED: usize = 2;

/// Lower bound for the automatically chosen shift epsilon.
pub const MIN_SHIFT_EPSILON: f64 = 1e-6;

// Fractional cut points are floored after adding this slack so that products
// such as 100 * 0.6 land on 60 rather than 59.999...
const CUT_SLACK: f64 = 1e-9;

/// Ordered samples plus the provenance needed to undo preprocessing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSeries {
    values: Vec<f64>,
    offset: f64,
    fill_mask: Vec<bool>,
}

impl TimeSeries {
    pub fn new(values: Vec<f64>) -> Self {
        let fill_mask = vec![false; values.len()];
        Self {
            values,
            offset: 0.0,
            fill_mask,
        }
    }

    /// Builds a series that already carries a positivity offset.
    pub fn with_offset(values: Vec<f64>, offset: f64) -> Self {
        let mut ts = Self::new(values);
        ts.offset = offset;
        ts
    }

    /// Parses one value per line. A non-numeric first line is treated as a
    /// header; any later blank or non-numeric record is a missing value and
    /// is filled by linear interpolation between its nearest valid
    /// neighbours (nearest value at the ends).
    pub fn from_csv<R: Read>(mut source: R) -> Result<Self> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        Self::parse_csv(&text)
    }

    pub fn parse_csv(text: &str) -> Result<Self> {
        let mut records: Vec<Option<f64>> = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let field = line.trim();
            let parsed = field.parse::<f64>().ok().filter(|v| v.is_finite());
            if lineno == 0 && parsed.is_none() && !field.is_empty() {
                continue;
            }
            records.push(parsed);
        }
        if records.is_empty() {
            return Err(PmbsiError::EmptySeries);
        }
        let valid = records.iter().filter(|r| r.is_some()).count();
        if valid < MIN_OBSERVED || records.len() < MIN_SERIES_LEN {
            return Err(PmbsiError::SeriesTooShort {
                valid,
                required: MIN_SERIES_LEN,
            });
        }
        Ok(interpolate_missing(&records))
    }

    /// Serializes the values one per line using shortest round-trip formatting.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.values.len() * 8);
        for v in &self.values {
            out.push_str(&v.to_string());
            out.push('\n');
        }
        out
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn fill_mask(&self) -> &[bool] {
        &self.fill_mask
    }

    pub fn filled_count(&self) -> usize {
        self.fill_mask.iter().filter(|&&f| f).count()
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max(&self) -> f64 {
        self.values.iter().copied().fold(f64::NEG_INFINITY, f64::max)
    }

    /// `0.1 * (max - min)`, floored at [`MIN_SHIFT_EPSILON`].
    pub fn default_epsilon(&self) -> f64 {
        if self.values.is_empty() {
            return MIN_SHIFT_EPSILON;
        }
        (0.1 * (self.max() - self.min())).max(MIN_SHIFT_EPSILON)
    }

    /// Adds `|min| + epsilon` to every sample when the minimum is not
    /// strictly positive; otherwise returns the series unchanged.
    pub fn shift_positive(&self, epsilon: f64) -> TimeSeries {
        let min = self.min();
        if self.values.is_empty() || min > 0.0 {
            return self.clone();
        }
        let shift = min.abs() + epsilon;
        TimeSeries {
            values: self.values.iter().map(|v| v + shift).collect(),
            offset: self.offset + shift,
            fill_mask: self.fill_mask.clone(),
        }
    }

    /// Maps a forecast made on the shifted scale back to the raw scale.
    pub fn unshift(&self, forecast: f64) -> f64 {
        forecast - self.offset
    }

    /// Contiguous sub-series; carries offset and fill flags along.
    pub fn slice(&self, range: Range<usize>) -> TimeSeries {
        TimeSeries {
            values: self.values[range.clone()].to_vec(),
            offset: self.offset,
            fill_mask: self.fill_mask[range].to_vec(),
        }
    }

    pub fn push(&mut self, value: f64) {
        self.values.push(value);
        self.fill_mask.push(false);
    }

    /// Chronological train / evaluation / validation split.
    pub fn split_three(&self, spec: &SplitSpec) -> Result<(TimeSeries, TimeSeries, TimeSeries)> {
        let bounds = spec.bounds(self.len())?;
        Ok((
            self.slice(bounds.train.clone()),
            self.slice(bounds.eval.clone()),
            self.slice(bounds.valid.clone()),
        ))
    }
}

impl AsRef<[f64]> for TimeSeries {
    fn as_ref(&self) -> &[f64] {
        &self.values
    }
}

fn interpolate_missing(records: &[Option<f64>]) -> TimeSeries {
    let n = records.len();
    let mut values = vec![0.0; n];
    let mut fill_mask = vec![false; n];
    let known: Vec<usize> = (0..n).filter(|&i| records[i].is_some()).collect();
    let first = known[0];
    let last = *known.last().unwrap();

    for (i, slot) in values.iter_mut().enumerate() {
        if let Some(v) = records[i] {
            *slot = v;
            continue;
        }
        fill_mask[i] = true;
        *slot = if i < first {
            records[first].unwrap()
        } else if i > last {
            records[last].unwrap()
        } else {
            // nearest valid neighbours on each side
            let right = known.partition_point(|&k| k < i);
            let (lo, hi) = (known[right - 1], known[right]);
            let (a, b) = (records[lo].unwrap(), records[hi].unwrap());
            let t = (i - lo) as f64 / (hi - lo) as f64;
            a + (b - a) * t
        };
    }

    TimeSeries {
        values,
        offset: 0.0,
        fill_mask,
    }
}

/// Fractions that define the chronological three-way split.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SplitSpec {
    /// Share of the series (most recent samples) held out for validation.
    pub valid_fraction: f64,
    /// Relative sizes of the training and evaluation parts of the remainder.
    pub train_eval_ratio: (f64, f64),
}

impl Default for SplitSpec {
    fn default() -> Self {
        Self {
            valid_fraction: 0.4,
            train_eval_ratio: (6.0, 4.0),
        }
    }
}

/// Index ranges of the three segments in the original series.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitBounds {
    pub train: Range<usize>,
    pub eval: Range<usize>,
    pub valid: Range<usize>,
}

impl SplitSpec {
    pub fn new(valid_fraction: f64, train_eval_ratio: (f64, f64)) -> Result<Self> {
        let spec = Self {
            valid_fraction,
            train_eval_ratio,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.valid_fraction > 0.0 && self.valid_fraction < 1.0) {
            return Err(PmbsiError::InvalidConfig(format!(
                "valid fraction must lie in (0, 1), got {}",
                self.valid_fraction
            )));
        }
        self.validate_ratio()
    }

    fn validate_ratio(&self) -> Result<()> {
        let (a, b) = self.train_eval_ratio;
        if !(a > 0.0 && b > 0.0 && a.is_finite() && b.is_finite()) {
            return Err(PmbsiError::InvalidConfig(format!(
                "train/eval ratio must be two positive numbers, got {a}/{b}"
            )));
        }
        Ok(())
    }

    /// Training share of the train+eval block.
    pub fn train_share(&self) -> f64 {
        let (a, b) = self.train_eval_ratio;
        a / (a + b)
    }

    /// Segment boundaries for a series of length `n`; cut points are floored.
    pub fn bounds(&self, n: usize) -> Result<SplitBounds> {
        self.validate()?;
        let train_eval = floor_cut(n as f64 * (1.0 - self.valid_fraction));
        let train = floor_cut(train_eval as f64 * self.train_share());
        let bounds = SplitBounds {
            train: 0..train,
            eval: train..train_eval,
            valid: train_eval..n,
        };
        if bounds.train.is_empty() || bounds.eval.is_empty() || bounds.valid.is_empty() {
            return Err(PmbsiError::DegenerateSplit {
                train: bounds.train.len(),
                eval: bounds.eval.len(),
                valid: bounds.valid.len(),
            });
        }
        Ok(bounds)
    }

    /// Train/eval cut of a block that has no validation part (the caller
    /// holds out its own tail).
    pub fn train_eval_bounds(&self, n: usize) -> Result<(Range<usize>, Range<usize>)> {
        self.validate_ratio()?;
        let train = floor_cut(n as f64 * self.train_share());
        if train == 0 || train >= n {
            return Err(PmbsiError::DegenerateSplit {
                train,
                eval: n.saturating_sub(train),
                valid: 0,
            });
        }
        Ok((0..train, train..n))
    }
}

fn floor_cut(x: f64) -> usize {
    (x + CUT_SLACK).floor().max(0.0) as usize
}
