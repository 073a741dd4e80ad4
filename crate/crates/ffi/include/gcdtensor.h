#ifndef GCDTENSOR_H
#define GCDTENSOR_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Result code of every fallible call.
 */
typedef enum GtStatus {
  GT_STATUS_OK = 0,
  GT_STATUS_NULL_POINTER = 1,
  GT_STATUS_INVALID_ARGUMENT = 2,
  GT_STATUS_SHAPE = 3,
  GT_STATUS_DOMAIN = 4,
  GT_STATUS_UNSUPPORTED = 5,
  GT_STATUS_NOT_CLOSED = 6,
  GT_STATUS_NOT_A_LATTICE = 7,
  GT_STATUS_PANIC = 8,
} GtStatus;

/**
 * Weighting used by [`gt_decompose`] and [`gt_det_closed_form`].
 */
typedef enum GtScheme {
  /**
   * Euler totient over the factor closure.
   */
  GT_SCHEME_PHI = 0,
  /**
   * Generalized totient over the GCD closure.
   */
  GT_SCHEME_PSI = 1,
  /**
   * `(g * mu)` for the multiplicative function named by `g`.
   */
  GT_SCHEME_MULTIPLICATIVE = 2,
  /**
   * `(p^r * mu)`, decomposing the entrywise `r`-th power.
   */
  GT_SCHEME_FRACTIONAL = 3,
} GtScheme;

typedef enum GtExtremum {
  GT_EXTREMUM_MIN = 0,
  GT_EXTREMUM_MAX = 1,
} GtExtremum;

/**
 * A strongly completely positive decomposition.
 */
typedef struct GtDecomposition GtDecomposition;

/**
 * A determinant, possibly kept in factored form.
 */
typedef struct GtDetReport GtDetReport;

/**
 * A dense tensor with integer, rational or float entries.
 */
typedef struct GtTensor GtTensor;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or NULL. The pointer is
 * valid until the next `gt_*` call on the same thread.
 */
const char *gt_last_error(void);

/**
 * Releases a string returned by this library. NULL is ignored.
 *
 * # Safety
 * `s` must come from this library and not have been freed.
 */
void gt_string_free(char *s);

/**
 * Builds the order-`order` GCD tensor of the `len` distinct positive
 * integers at `elements`.
 *
 * # Safety
 * `elements` must point to `len` readable values; `out` must be writable.
 */
enum GtStatus gt_tensor_build(const uint64_t *elements,
                              size_t len,
                              size_t order,
                              struct GtTensor **out);

/**
 * Parses a tensor from its JSON encoding (a bare tensor or a CLI report).
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be writable.
 */
enum GtStatus gt_tensor_from_json(const char *json, struct GtTensor **out);

/**
 * # Safety
 * `t` must be a live tensor handle; `out` must be writable.
 */
enum GtStatus gt_tensor_to_json(const struct GtTensor *t, char **out);

/**
 * Order (number of indices) of `t`, or 0 for NULL.
 *
 * # Safety
 * `t` must be NULL or a live tensor handle.
 */
size_t gt_tensor_order(const struct GtTensor *t);

/**
 * Extent of the first index of `t`, or 0 for NULL.
 *
 * # Safety
 * `t` must be NULL or a live tensor handle.
 */
size_t gt_tensor_dim(const struct GtTensor *t);

/**
 * Copies all entries, converted to double, into `buf` in row-major order.
 *
 * # Safety
 * `t` must be a live tensor handle; `buf` must hold `len` doubles.
 */
enum GtStatus gt_tensor_entries_f64(const struct GtTensor *t, double *buf, size_t len);

/**
 * # Safety
 * `t` must be NULL or a handle from this library not yet freed.
 */
void gt_tensor_free(struct GtTensor *t);

/**
 * Decomposes the GCD tensor of `elements` (or its transform) as a sum of
 * weighted symmetric outer powers. `g` names the multiplicative function
 * for `GT_SCHEME_MULTIPLICATIVE` and is ignored otherwise; `r` is the
 * exponent for `GT_SCHEME_FRACTIONAL`.
 *
 * # Safety
 * `elements` must point to `len` values, `g` must be NULL or a
 * NUL-terminated string, and `out` must be writable.
 */
enum GtStatus gt_decompose(const uint64_t *elements,
                           size_t len,
                           size_t order,
                           enum GtScheme scheme,
                           const char *g,
                           double r,
                           struct GtDecomposition **out);

/**
 * Sums the decomposition back into a dense tensor.
 *
 * # Safety
 * `d` must be a live decomposition handle; `out` must be writable.
 */
enum GtStatus gt_decomposition_reconstruct(const struct GtDecomposition *d, struct GtTensor **out);

/**
 * Writes 1 to `spanning` if the vectors span the whole space, else 0.
 *
 * # Safety
 * `d` must be a live decomposition handle; `spanning` must be writable.
 */
enum GtStatus gt_decomposition_spanning(const struct GtDecomposition *d, int *spanning);

/**
 * # Safety
 * `d` must be a live decomposition handle; `out` must be writable.
 */
enum GtStatus gt_decomposition_to_json(const struct GtDecomposition *d, char **out);

/**
 * # Safety
 * `d` must be NULL or a handle from this library not yet freed.
 */
void gt_decomposition_free(struct GtDecomposition *d);

/**
 * Closed-form determinant of the order-`order` GCD tensor. Fails with
 * `GT_STATUS_NOT_CLOSED` when the set lacks the closure property the
 * scheme needs. `GT_SCHEME_FRACTIONAL` is not accepted.
 *
 * # Safety
 * As for [`gt_decompose`].
 */
enum GtStatus gt_det_closed_form(const uint64_t *elements,
                                 size_t len,
                                 size_t order,
                                 enum GtScheme scheme,
                                 const char *g,
                                 struct GtDetReport **out);

/**
 * Determinant computed directly from the entries: a matrix determinant at
 * order 2, a Sylvester resultant in dimension 2. Other shapes and float
 * tensors give `GT_STATUS_UNSUPPORTED`.
 *
 * # Safety
 * `t` must be a live tensor handle; `out` must be writable.
 */
enum GtStatus gt_det_oracle(const struct GtTensor *t, struct GtDetReport **out);

/**
 * The determinant as a decimal or `p/q` string, or NULL in `out` when it
 * is too large to expand (see the JSON for its factored form).
 *
 * # Safety
 * `r` must be a live report handle; `out` must be writable.
 */
enum GtStatus gt_det_report_value(const struct GtDetReport *r, char **out);

/**
 * Writes 1 if both values are known and equal, 0 if they differ, -1 if
 * either is unexpanded.
 *
 * # Safety
 * `a` and `b` must be live report handles; `out` must be writable.
 */
enum GtStatus gt_det_report_agrees(const struct GtDetReport *a,
                                   const struct GtDetReport *b,
                                   int *out);

/**
 * # Safety
 * `r` must be a live report handle; `out` must be writable.
 */
enum GtStatus gt_det_report_to_json(const struct GtDetReport *r, char **out);

/**
 * # Safety
 * `r` must be NULL or a handle from this library not yet freed.
 */
void gt_det_report_free(struct GtDetReport *r);

/**
 * Searches for a vector with negative form value (even order only).
 * `witness_found` receives 1 or 0 and `min_value` the smallest normalized
 * value seen. When `witness` is not NULL it must hold `dim` doubles and
 * receives the witness if one was found.
 *
 * # Safety
 * `t` must be a live tensor handle; the output pointers must be writable.
 */
enum GtStatus gt_psd_check(const struct GtTensor *t,
                           size_t trials,
                           uint64_t seed,
                           int *witness_found,
                           double *min_value,
                           double *witness);

/**
 * Minimum or maximum of the form `A x^m` over the unit `m`-sphere of a
 * symmetric even-order tensor. `vector` may be NULL; otherwise it must
 * hold `dim` doubles and receives the optimizer.
 *
 * # Safety
 * `t` must be a live tensor handle; the output pointers must be writable.
 */
enum GtStatus gt_extreme_form(const struct GtTensor *t,
                              enum GtExtremum mode,
                              size_t restarts,
                              size_t iterations,
                              uint64_t seed,
                              double *value,
                              double *vector);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GCDTENSOR_H */
