#ifndef TUMORSTAB_H
#define TUMORSTAB_H

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

#define TS_OK 0

/**
 * A required pointer was null.
 */
#define TS_ERR_NULL 1

/**
 * Input outside the admissible range.
 */
#define TS_ERR_VALIDATION 2

/**
 * The computation failed (no convergence, ill conditioning, ...).
 */
#define TS_ERR_NUMERICAL 3

/**
 * Internal error; the library caught a panic.
 */
#define TS_ERR_PANIC 4

/**
 * Stationary tumor at fixed parameters.
 */
typedef struct TsProfile TsProfile;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Builds the stationary profile; `*out` receives a new handle.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
int32_t ts_profile_new(double beta, double sigma_tilde, double mu, struct TsProfile **out);

/**
 * Releases a handle from `ts_profile_new`. Null is ignored.
 *
 * # Safety
 * `p` must be null or a live handle, and is invalid afterwards.
 */
void ts_profile_free(struct TsProfile *p);

/**
 * Stationary radius.
 *
 * # Safety
 * `p` must be null or a live handle; `out` null or valid for writes.
 */
int32_t ts_profile_radius(const struct TsProfile *p, double *out);

/**
 * Nutrient level at radius `r`.
 *
 * # Safety
 * As for `ts_profile_radius`.
 */
int32_t ts_profile_sigma(const struct TsProfile *p, double r, double *out);

/**
 * `h_n(s)` at `s = s_re + i s_im`.
 *
 * # Safety
 * `p` must be null or a live handle; outputs null or valid for writes.
 */
int32_t ts_dispersion(const struct TsProfile *p,
                      uint32_t n,
                      double s_re,
                      double s_im,
                      double *out_re,
                      double *out_im);

/**
 * Zero of `h_n` with the largest real part.
 *
 * # Safety
 * As for `ts_dispersion`.
 */
int32_t ts_dominant_root(const struct TsProfile *p, uint32_t n, double *out_re, double *out_im);

/**
 * Bifurcation value `μ_n` (`n >= 1`).
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
int32_t ts_mu_bifurcation(double beta, double sigma_tilde, uint32_t n, double *out);

/**
 * Stability threshold `μ*` with default options.
 *
 * # Safety
 * `out` must be null or valid for writes.
 */
int32_t ts_mu_star(double beta, double sigma_tilde, double *out);

/**
 * Copies the calling thread's last error message, NUL terminated and
 * truncated to `cap` bytes, into `buf`. Returns the buffer size needed for
 * the full message. `buf` may be null to query the size.
 *
 * # Safety
 * `buf` must be null or valid for `cap` bytes.
 */
uintptr_t ts_last_error(char *buf, uintptr_t cap);

/**
 * Library version as a static NUL-terminated string.
 */
const char *ts_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TUMORSTAB_H */
