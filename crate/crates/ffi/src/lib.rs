//! C ABI for the `pmbsi` forecasting library.
//!
//! Series and fitted models are opaque handles created by `pmbsi_*_new` /
//! `pmbsi_fit` and released with the matching `*_free`. Every fallible call
//! returns a [`PmbsiStatus`]; the message for the last failure on the calling
//! thread is available from [`pmbsi_last_error_message`]. Panics never cross
//! the boundary.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;

use pmbsi::cli::commands::{bounds_for_horizon, load_series, predict_series};
use pmbsi::cli::report::{ModelFile, VERSION};
use pmbsi::ga::GaConfig;
use pmbsi::{evolve, Mode, PmbsiError, SplitSpec, StringParams, TimeSeries};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PmbsiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DataError = 3,
    NumericalFailure = 4,
    Panic = 5,
}

/// Model parameters: string length, horizon, homotopy parameters and Q.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PmbsiParams {
    pub l_s: usize,
    pub l_pr: usize,
    pub eta1: f64,
    pub eta2: f64,
    pub q: f64,
}

impl From<StringParams> for PmbsiParams {
    fn from(p: StringParams) -> Self {
        Self {
            l_s: p.l_s,
            l_pr: p.l_pr,
            eta1: p.eta1,
            eta2: p.eta2,
            q: p.q,
        }
    }
}

/// Opaque time series.
pub struct PmbsiSeries {
    inner: TimeSeries,
}

/// Opaque fitted model.
pub struct PmbsiModel {
    inner: ModelFile,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn status_of(err: &PmbsiError) -> PmbsiStatus {
    match err {
        PmbsiError::InvalidParams(_) | PmbsiError::InvalidConfig(_) => PmbsiStatus::InvalidArgument,
        PmbsiError::Numerical(_) => PmbsiStatus::NumericalFailure,
        _ => PmbsiStatus::DataError,
    }
}

enum Failure {
    Null(&'static str),
    Lib(PmbsiError),
}

impl From<PmbsiError> for Failure {
    fn from(e: PmbsiError) -> Self {
        Failure::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> PmbsiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => PmbsiStatus::Ok,
        Ok(Err(Failure::Null(what))) => {
            set_error(format!("null pointer: {what}"));
            PmbsiStatus::NullPointer
        }
        Ok(Err(Failure::Lib(e))) => {
            set_error(e.to_string());
            status_of(&e)
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            PmbsiStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(ptr: *const T, what: &'static str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or(Failure::Null(what))
}

unsafe fn write_out<T>(ptr: *mut T, value: T, what: &'static str) -> Result<(), Failure> {
    if ptr.is_null() {
        return Err(Failure::Null(what));
    }
    ptr.write(value);
    Ok(())
}

/// Message describing the last failure on this thread, or NULL if none.
/// The pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn pmbsi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pmbsi_version() -> *const c_char {
    static V: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    V.as_ptr().cast()
}

/// Copies `len` values into a new series.
///
/// # Safety
/// `values` must point to `len` readable doubles and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pmbsi_series_new(values: *const f64, len: usize, out: *mut *mut PmbsiSeries) -> PmbsiStatus {
    guard(|| {
        if values.is_null() {
            return Err(Failure::Null("values"));
        }
        let data = std::slice::from_raw_parts(values, len).to_vec();
        if data.is_empty() {
            return Err(PmbsiError::EmptySeries.into());
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(PmbsiError::Parse(format!("value {i} is not finite")).into());
        }
        let handle = Box::into_raw(Box::new(PmbsiSeries {
            inner: TimeSeries::new(data),
        }));
        write_out(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// Reads a one-column CSV file; gaps are filled by linear interpolation.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn pmbsi_series_from_csv(path: *const c_char, out: *mut *mut PmbsiSeries) -> PmbsiStatus {
    guard(|| {
        if path.is_null() {
            return Err(Failure::Null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| PmbsiError::InvalidConfig("path is not UTF-8".into()))?;
        let series = load_series(Path::new(path))?;
        let handle = Box::into_raw(Box::new(PmbsiSeries { inner: series }));
        write_out(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// Number of values, or 0 for NULL.
///
/// # Safety
/// `series` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn pmbsi_series_len(series: *const PmbsiSeries) -> usize {
    series.as_ref().map_or(0, |s| s.inner.len())
}

/// Copies up to `cap` values into `buf` and writes the series length to `len`.
///
/// # Safety
/// `series` must be a live handle and `buf` must hold `cap` doubles.
#[no_mangle]
pub unsafe extern "C" fn pmbsi_series_values(series: *const PmbsiSeries, buf: *mut f64, cap: usize, len: *mut usize) -> PmbsiStatus {
    guard(|| {
        let s = deref(series, "series")?;
        let values = s.inner.values();
        let n = values.len().min(cap);
        if n > 0 {
            if buf.is_null() {
                return Err(Failure::Null("buf"));
            }
            std::ptr::copy_nonoverlapping(values.as_ptr(), buf, n);
        }
        write_out(len, values.len(), "len")
    })
}

/// # Safety
/// `series` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pmbsi_series_free(series: *mut PmbsiSeries) {
    if !series.is_null() {
        drop(Box::from_raw(series));
    }
}

/// One forecast of the value `params.l_pr` steps after index `tau0`. The
/// series must be strictly positive. `*defined` is false when the forecast
/// is undefined, in which case `*value` is NaN.
///
/// # Safety
/// Pointers must be valid; `series` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn pmbsi_predict_one(
    series: *const PmbsiSeries,
    tau0: usize,
    params: *const PmbsiParams,
    value: *mut f64,
    defined: *mut bool,
) -> PmbsiStatus {
    guard(|| {
        let s = deref(series, "series")?;
        let p = deref(params, "params")?;
        let params = StringParams::new(p.l_s, p.l_pr, p.eta1, p.eta2, p.q)?;
        let forecast = pmbsi::predict_one(s.inner.values(), tau0, &params)?;
        write_out(value, forecast.value.unwrap_or(f64::NAN), "value")?;
        write_out(defined, forecast.value.is_some(), "defined")
    })
}

/// Fits a direct `horizon`-step model with default GA settings and the
/// given seed. The series is shifted positive and split into training and
/// evaluation blocks by the default 6:4 ratio.
///
/// # Safety
/// `series` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmbsi_fit(series: *const PmbsiSeries, horizon: usize, seed: u64, out: *mut *mut PmbsiModel) -> PmbsiStatus {
    guard(|| {
        let s = deref(series, "series")?;
        if horizon == 0 {
            return Err(PmbsiError::InvalidConfig("horizon must be at least 1".into()).into());
        }
        let shifted = s.inner.shift_positive(s.inner.default_epsilon());
        let (train, eval) = SplitSpec::default().train_eval_bounds(shifted.len())?;
        let defaults = GaConfig::default();
        let config = GaConfig {
            seed,
            bounds: bounds_for_horizon(&defaults.bounds, horizon),
            ..defaults
        };
        let values = shifted.values();
        let evo = evolve(&values[train], &values[eval], horizon, &config)?;
        let model = ModelFile {
            params: evo.params,
            offset: shifted.offset(),
            mode: Mode::Direct,
            seed,
            bounds: evo.trace.effective_bounds,
            version: VERSION.to_string(),
        };
        let handle = Box::into_raw(Box::new(PmbsiModel { inner: model }));
        write_out(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// Loads a model file written by the command-line `fit`.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmbsi_model_load(path: *const c_char, out: *mut *mut PmbsiModel) -> PmbsiStatus {
    guard(|| {
        if path.is_null() {
            return Err(Failure::Null("path"));
        }
        let path = CStr::from_ptr(path)
            .to_str()
            .map_err(|_| PmbsiError::InvalidConfig("path is not UTF-8".into()))?;
        let model = ModelFile::load(Path::new(path))?;
        let handle = Box::into_raw(Box::new(PmbsiModel { inner: model }));
        write_out(out, handle, "out").inspect_err(|_| drop(Box::from_raw(handle)))
    })
}

/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmbsi_model_params(model: *const PmbsiModel, out: *mut PmbsiParams) -> PmbsiStatus {
    guard(|| {
        let m = deref(model, "model")?;
        write_out(out, m.inner.params.into(), "out")
    })
}

/// Offset added to the data before fitting.
///
/// # Safety
/// `model` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn pmbsi_model_offset(model: *const PmbsiModel, out: *mut f64) -> PmbsiStatus {
    guard(|| {
        let m = deref(model, "model")?;
        write_out(out, m.inner.offset, "out")
    })
}

/// Forecasts the `steps` values after the end of `series` (raw scale) into
/// `buf`. A one-step model is iterated; a direct model allows `steps <= l_pr`.
///
/// # Safety
/// Handles must be live and `buf` must hold `steps` doubles.
#[no_mangle]
pub unsafe extern "C" fn pmbsi_model_forecast(
    model: *const PmbsiModel,
    series: *const PmbsiSeries,
    steps: usize,
    buf: *mut f64,
) -> PmbsiStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let s = deref(series, "series")?;
        if buf.is_null() {
            return Err(Failure::Null("buf"));
        }
        let values = predict_series(&m.inner, &s.inner, steps)?;
        std::ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
        Ok(())
    })
}

/// # Safety
/// `model` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn pmbsi_model_free(model: *mut PmbsiModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}
