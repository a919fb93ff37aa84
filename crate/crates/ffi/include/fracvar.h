/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#ifndef FRACVAR_H
#define FRACVAR_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FracvarRegime {
  FRACVAR_REGIME_SUB = 0,
  FRACVAR_REGIME_CRITICAL = 1,
  FRACVAR_REGIME_SUPER = 2,
} FracvarRegime;

typedef enum FracvarStatus {
  FRACVAR_STATUS_OK = 0,
  FRACVAR_STATUS_NULL_POINTER = 1,
  FRACVAR_STATUS_INVALID_UTF8 = 2,
  FRACVAR_STATUS_DOMAIN = 3,
  FRACVAR_STATUS_INVALID_WAVE = 4,
  FRACVAR_STATUS_INVALID_WEIGHT = 5,
  FRACVAR_STATUS_UNSUPPORTED_SPEC = 6,
  FRACVAR_STATUS_UNSUPPORTED_SIGN = 7,
  FRACVAR_STATUS_CAPACITY = 8,
  FRACVAR_STATUS_SHAPE = 9,
  FRACVAR_STATUS_FORMAT = 10,
  FRACVAR_STATUS_CONTRACT = 11,
  FRACVAR_STATUS_HYPOTHESIS = 12,
  FRACVAR_STATUS_NO_BRACKET = 13,
  FRACVAR_STATUS_IO = 14,
  FRACVAR_STATUS_BUFFER_TOO_SMALL = 15,
  FRACVAR_STATUS_PANIC = 16,
} FracvarStatus;

/**
 * Opaque handle to a validated Weierstrass-type function.
 */
typedef struct FracvarSpec FracvarSpec;

typedef struct FracvarRegimeReport {
  enum FracvarRegime regime;
  double psi_at_inv_b;
  double threshold;
  /**
   * Hölder exponent in the super regime, NaN otherwise.
   */
  double beta;
  double q;
} FracvarRegimeReport;

typedef struct FracvarZMoment {
  double mean;
  double std_error;
  double tail_bound;
} FracvarZMoment;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message for the last failed call on this thread (empty after success).
 */
const char *fracvar_last_error(void);

/**
 * Builds a spec from catalog names, e.g. `"power:0.5"`, `"triangular"`,
 * `"plus"`. The handle must be released with [`fracvar_spec_free`].
 *
 * # Safety
 * String arguments must be NUL-terminated; `out` must be writable.
 */
enum FracvarStatus fracvar_spec_new(uint32_t b,
                                    const char *weight,
                                    const char *wave,
                                    const char *signs,
                                    struct FracvarSpec **out);

/**
 * # Safety
 * `spec` must come from [`fracvar_spec_new`] and not be freed twice.
 */
void fracvar_spec_free(struct FracvarSpec *spec);

/**
 * `f(t)` within `tol`; `err` (optional) receives the truncation bound.
 *
 * # Safety
 * `spec` must be a live handle; `value` must be writable; `err` may be null.
 */
enum FracvarStatus fracvar_eval_f(const struct FracvarSpec *spec,
                                  double t,
                                  double tol,
                                  double *value,
                                  double *err);

/**
 * Number of points `b^n + 1` on the level-`n` grid.
 *
 * # Safety
 * `spec` must be a live handle; `len` must be writable.
 */
enum FracvarStatus fracvar_grid_len(const struct FracvarSpec *spec, uint32_t n, size_t *len);

/**
 * Writes `f(k b^{-n})`, `k = 0..=b^n`, into `buf`.
 *
 * # Safety
 * `spec` must be a live handle; `buf` must hold `cap` writable doubles.
 */
enum FracvarStatus fracvar_eval_grid(const struct FracvarSpec *spec,
                                     uint32_t n,
                                     double *buf,
                                     size_t cap);

/**
 * `V^{p,t}_n` of `len = b^n + 1` samples.
 *
 * # Safety
 * `samples` must hold `len` readable doubles; `out` must be writable.
 */
enum FracvarStatus fracvar_pth_variation(const double *samples,
                                         size_t len,
                                         uint32_t b,
                                         double p,
                                         double t,
                                         double *out);

/**
 * `RV^p_n = b^{n(p−1)} V^{p,1}_n` of `len = b^n + 1` samples.
 *
 * # Safety
 * `samples` must hold `len` readable doubles; `out` must be writable.
 */
enum FracvarStatus fracvar_riesz_variation(const double *samples,
                                           size_t len,
                                           uint32_t b,
                                           double p,
                                           double *out);

/**
 * `V^{p,1}_n` by enumeration of all `b^n` digit paths.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum FracvarStatus fracvar_enumerate_variation(const struct FracvarSpec *spec,
                                               double p,
                                               uint32_t n,
                                               double *out);

/**
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum FracvarStatus fracvar_classify_regime(const struct FracvarSpec *spec,
                                           struct FracvarRegimeReport *out);

/**
 * Seeded Monte Carlo estimate of `E|Z_N|^p`.
 *
 * # Safety
 * `spec` must be a live handle; `out` must be writable.
 */
enum FracvarStatus fracvar_z_moment(const struct FracvarSpec *spec,
                                    double p,
                                    size_t samples,
                                    uint32_t trunc_n,
                                    uint64_t seed,
                                    struct FracvarZMoment *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FRACVAR_H */
