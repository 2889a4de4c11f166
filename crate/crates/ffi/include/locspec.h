#ifndef LOCSPEC_H
#define LOCSPEC_H

#pragma once

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum LsKernel {
  LS_KERNEL_EPANECHNIKOV = 0,
  LS_KERNEL_TRIANGULAR = 1,
  LS_KERNEL_UNIFORM = 2,
} LsKernel;

/**
 * Evaluation route for spectral means.
 */
typedef enum LsRoute {
  LS_ROUTE_FREQUENCY = 0,
  LS_ROUTE_LAG = 1,
} LsRoute;

typedef enum LsStatus {
  LS_STATUS_OK = 0,
  LS_STATUS_NULL_POINTER = 1,
  LS_STATUS_INVALID_UTF8 = 2,
  LS_STATUS_CONFIG = 3,
  LS_STATUS_INVALID_ARGUMENT = 4,
  LS_STATUS_INVALID_CURVE = 5,
  LS_STATUS_INVALID_MODEL = 6,
  LS_STATUS_OUT_OF_BAND = 7,
  LS_STATUS_OUTSIDE_BOX = 8,
  LS_STATUS_ILL_CONDITIONED = 9,
  LS_STATUS_NUMERICAL = 10,
  LS_STATUS_IO = 11,
  LS_STATUS_BUFFER_TOO_SMALL = 12,
  LS_STATUS_PANIC = 13,
} LsStatus;

/**
 * Opaque validated tvARMA model.
 */
typedef struct LsModel LsModel;

/**
 * Opaque observed or simulated series.
 */
typedef struct LsSample LsSample;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer
 * stays valid until the next failing call on the same thread.
 */
const char *ls_last_error(void);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ls_version(void);

/**
 * Builds a model from its JSON description.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum LsStatus ls_model_from_json(const char *json, struct LsModel **out);

/**
 * # Safety
 * `model` must come from [`ls_model_from_json`] and not be freed twice. NULL is ignored.
 */
void ls_model_free(struct LsModel *model);

/**
 * `f(u, lambda)`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum LsStatus ls_model_spectral_density(const struct LsModel *model,
                                        double u,
                                        double lambda,
                                        double *out);

/**
 * `c(u, k)`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum LsStatus ls_model_covariance(const struct LsModel *model, double u, int64_t k, double *out);

/**
 * Simulates `n` observations from stream `stream` of `seed`.
 *
 * # Safety
 * `model` must be a live handle; `out` must be writable.
 */
enum LsStatus ls_simulate(const struct LsModel *model,
                          size_t n,
                          uint64_t seed,
                          uint64_t stream,
                          struct LsSample **out);

/**
 * Copies `n` values into a new sample.
 *
 * # Safety
 * `values` must point to `n` readable doubles; `out` must be writable.
 */
enum LsStatus ls_sample_from_values(const double *values, size_t n, struct LsSample **out);

/**
 * # Safety
 * `sample` must be a live handle or NULL.
 */
size_t ls_sample_len(const struct LsSample *sample);

/**
 * Copies the sample into `buf`, which must hold `ls_sample_len` values.
 *
 * # Safety
 * `sample` must be a live handle; `buf` must point to `cap` writable doubles.
 */
enum LsStatus ls_sample_values(const struct LsSample *sample, double *buf, size_t cap);

/**
 * # Safety
 * `sample` must come from this API and not be freed twice. NULL is ignored.
 */
void ls_sample_free(struct LsSample *sample);

/**
 * Untapered spectral mean `F_n(phi)`. `functional` is a menu name such as
 * `"cos1"` or an inline functional in JSON.
 *
 * # Safety
 * `sample` must be a live handle, `functional` NUL-terminated, `out` writable.
 */
enum LsStatus ls_spectral_mean(const struct LsSample *sample,
                               const char *functional,
                               enum LsRoute route,
                               double *out);

/**
 * Global Whittle fit. `family_json` is e.g. `{"family":{"kind":"ar","p":2}}`.
 * The parameter vector `(ar..., ma..., sigma2)` goes to `theta`; its length
 * is written to `dim` even when `cap` is too small.
 *
 * # Safety
 * Pointers must be valid; `theta` must hold `cap` doubles.
 */
enum LsStatus ls_fit_whittle(const struct LsSample *sample,
                             const char *family_json,
                             double *theta,
                             size_t cap,
                             size_t *dim);

/**
 * Local Yule-Walker estimate at `u`: `p` coefficients into `alpha` and the
 * innovation variance into `sigma2`.
 *
 * # Safety
 * `sample` must be a live handle; `alpha` must hold `p` doubles; `sigma2` writable.
 */
enum LsStatus ls_local_yule_walker(const struct LsSample *sample,
                                   size_t p,
                                   enum LsKernel kernel,
                                   double bandwidth,
                                   double u,
                                   double *alpha,
                                   double *sigma2);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* LOCSPEC_H */
