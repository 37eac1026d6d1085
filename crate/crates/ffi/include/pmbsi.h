#ifndef PMBSI_H
#define PMBSI_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum PmbsiStatus {
  PMBSI_STATUS_OK = 0,
  PMBSI_STATUS_NULL_POINTER = 1,
  PMBSI_STATUS_INVALID_ARGUMENT = 2,
  PMBSI_STATUS_DATA_ERROR = 3,
  PMBSI_STATUS_NUMERICAL_FAILURE = 4,
  PMBSI_STATUS_PANIC = 5,
} PmbsiStatus;

/**
 * Opaque fitted model.
 */
typedef struct PmbsiModel PmbsiModel;

/**
 * Opaque time series.
 */
typedef struct PmbsiSeries PmbsiSeries;

/**
 * Model parameters: string length, horizon, homotopy parameters and Q.
 */
typedef struct PmbsiParams {
  size_t l_s;
  size_t l_pr;
  double eta1;
  double eta2;
  double q;
} PmbsiParams;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message describing the last failure on this thread, or NULL if none.
 * The pointer stays valid until the next failing call on the same thread.
 */
const char *pmbsi_last_error_message(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *pmbsi_version(void);

/**
 * Copies `len` values into a new series.
 *
 * # Safety
 * `values` must point to `len` readable doubles and `out` must be writable.
 */
enum PmbsiStatus pmbsi_series_new(const double *values, size_t len, struct PmbsiSeries **out);

/**
 * Reads a one-column CSV file; gaps are filled by linear interpolation.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` must be writable.
 */
enum PmbsiStatus pmbsi_series_from_csv(const char *path, struct PmbsiSeries **out);

/**
 * Number of values, or 0 for NULL.
 *
 * # Safety
 * `series` must be NULL or a live handle.
 */
size_t pmbsi_series_len(const struct PmbsiSeries *series);

/**
 * Copies up to `cap` values into `buf` and writes the series length to `len`.
 *
 * # Safety
 * `series` must be a live handle and `buf` must hold `cap` doubles.
 */
enum PmbsiStatus pmbsi_series_values(const struct PmbsiSeries *series,
                                     double *buf,
                                     size_t cap,
                                     size_t *len);

/**
 * # Safety
 * `series` must be NULL or a handle not yet freed.
 */
void pmbsi_series_free(struct PmbsiSeries *series);

/**
 * One forecast of the value `params.l_pr` steps after index `tau0`. The
 * series must be strictly positive. `*defined` is false when the forecast
 * is undefined, in which case `*value` is NaN.
 *
 * # Safety
 * Pointers must be valid; `series` must be a live handle.
 */
enum PmbsiStatus pmbsi_predict_one(const struct PmbsiSeries *series,
                                   size_t tau0,
                                   const struct PmbsiParams *params,
                                   double *value,
                                   bool *defined);

/**
 * Fits a direct `horizon`-step model with default GA settings and the
 * given seed. The series is shifted positive and split into training and
 * evaluation blocks by the default 6:4 ratio.
 *
 * # Safety
 * `series` must be a live handle and `out` writable.
 */
enum PmbsiStatus pmbsi_fit(const struct PmbsiSeries *series,
                           size_t horizon,
                           uint64_t seed,
                           struct PmbsiModel **out);

/**
 * Loads a model file written by the command-line `fit`.
 *
 * # Safety
 * `path` must be a NUL-terminated string and `out` writable.
 */
enum PmbsiStatus pmbsi_model_load(const char *path, struct PmbsiModel **out);

/**
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum PmbsiStatus pmbsi_model_params(const struct PmbsiModel *model, struct PmbsiParams *out);

/**
 * Offset added to the data before fitting.
 *
 * # Safety
 * `model` must be a live handle and `out` writable.
 */
enum PmbsiStatus pmbsi_model_offset(const struct PmbsiModel *model, double *out);

/**
 * Forecasts the `steps` values after the end of `series` (raw scale) into
 * `buf`. A one-step model is iterated; a direct model allows `steps <= l_pr`.
 *
 * # Safety
 * Handles must be live and `buf` must hold `steps` doubles.
 */
enum PmbsiStatus pmbsi_model_forecast(const struct PmbsiModel *model,
                                      const struct PmbsiSeries *series,
                                      size_t steps,
                                      double *buf);

/**
 * # Safety
 * `model` must be NULL or a handle not yet freed.
 */
void pmbsi_model_free(struct PmbsiModel *model);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* PMBSI_H */
