//! Time-series forecasting with string invariants.
//!
//! A positive series is mapped onto Q-deformed one- and two-end-point string
//! maps; a weighted mixture of those maps, `C(tau, Lambda)`, is assumed to
//! stay approximately constant under a shift by the forecast horizon, which
//! gives a closed-form forecast. A genetic algorithm tunes the free
//! parameters `(l_s, eta1, eta2, Q)` against training MAE.

pub mod cli;
pub mod error;
pub mod ga;
pub mod invariant;
pub mod metrics;
pub mod predictor;
pub mod series;
pub mod stringmap;

pub use error::{PmbsiError, Result};
pub use ga::{evolve, Evolution, GaConfig, ParamBounds};
pub use invariant::{compute_aux, compute_c, StringParams};
pub use metrics::{mae, smape, SmapeVariant};
pub use predictor::{iterated_predict, naive_forecast, predict_one, predict_range, Forecast, Mode};
pub use series::{SplitSpec, TimeSeries};
