#ifndef FOLDNET_H
#define FOLDNET_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  FOLDNET_STATUS_OK = 0,
  FOLDNET_STATUS_NULL_POINTER = 1,
  FOLDNET_STATUS_DOMAIN = 2,
  FOLDNET_STATUS_PRECISION = 3,
  FOLDNET_STATUS_UNSUPPORTED = 4,
  FOLDNET_STATUS_CONTRACT = 5,
  FOLDNET_STATUS_INDEX_OVERFLOW = 6,
  FOLDNET_STATUS_PARSE = 7,
  FOLDNET_STATUS_IO = 8,
  FOLDNET_STATUS_BUFFER_TOO_SMALL = 9,
  FOLDNET_STATUS_PANIC = 10,
} FoldnetStatus;

typedef enum {
  FOLDNET_SCRAMBLE_NESTED = 0,
  FOLDNET_SCRAMBLE_RANDOM_LINEAR = 1,
  FOLDNET_SCRAMBLE_I_BINOMIAL = 2,
  FOLDNET_SCRAMBLE_ASM = 3,
} FoldnetScramble;

/**
 * Opaque handle to a point set.
 */
typedef struct FoldnetPointSet FoldnetPointSet;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Description of the most recent failure on this thread, or NULL.
 */
const char *foldnet_last_error_message(void);

/**
 * Default digits per coordinate for `base`: `ceil(53 / log2 base)`.
 */
size_t foldnet_default_precision(uint32_t base);

/**
 * The first `lambda * base^m` Faure points. `precision` 0 selects the default.
 */
FoldnetStatus foldnet_faure_net(uint32_t base,
                                size_t dim,
                                size_t m,
                                uint64_t lambda,
                                size_t precision,
                                FoldnetPointSet **out);

/**
 * A point set from `n * dim` row-major values in `[0,1)`.
 */
FoldnetStatus foldnet_point_set_from_values(uint32_t base,
                                            size_t dim,
                                            size_t precision,
                                            const double *values,
                                            size_t n,
                                            FoldnetPointSet **out);

/**
 * Parses the point-set text format from a NUL-terminated string.
 */
FoldnetStatus foldnet_point_set_parse(const char *text, FoldnetPointSet **out);

/**
 * Releases a handle. NULL is ignored.
 */
void foldnet_point_set_free(FoldnetPointSet *set);

/**
 * Number of points, or 0 for NULL.
 */
size_t foldnet_point_set_len(const FoldnetPointSet *set);

/**
 * Dimension, or 0 for NULL.
 */
size_t foldnet_point_set_dim(const FoldnetPointSet *set);

/**
 * Base, or 0 for NULL.
 */
uint32_t foldnet_point_set_base(const FoldnetPointSet *set);

/**
 * Writes `len * dim` row-major coordinates into `out`, which holds `capacity` doubles.
 */
FoldnetStatus foldnet_point_set_values(const FoldnetPointSet *set, double *out, size_t capacity);

/**
 * A seeded scramble of every point.
 */
FoldnetStatus foldnet_scramble(const FoldnetPointSet *set,
                               FoldnetScramble kind,
                               uint64_t seed,
                               FoldnetPointSet **out);

/**
 * Adjoins the reflection of every point at the given per-coordinate orders (`-1` keeps a coordinate).
 */
FoldnetStatus foldnet_fold_reflection(const FoldnetPointSet *set,
                                      const int32_t *orders,
                                      size_t len,
                                      FoldnetPointSet **out);

/**
 * Box fold at orders `rho`; with `rho` NULL the balanced split of `m` is used.
 */
FoldnetStatus foldnet_fold_box(const FoldnetPointSet *set,
                               const size_t *rho,
                               size_t m,
                               FoldnetPointSet **out);

/**
 * Folds a two-dimensional net by every `(k, m-k)`.
 */
FoldnetStatus foldnet_fold_monomial(const FoldnetPointSet *set, size_t m, FoldnetPointSet **out);

/**
 * Exact check of the `(lambda, q, m, d)`-net property; `violations` may be NULL.
 */
FoldnetStatus foldnet_check_net(const FoldnetPointSet *set,
                                size_t m,
                                size_t q,
                                uint64_t lambda,
                                bool relaxed,
                                bool *passed,
                                size_t *violations);

/**
 * Star discrepancy of a one- or two-dimensional set.
 */
FoldnetStatus foldnet_star_discrepancy(const FoldnetPointSet *set, double *out);

/**
 * Gain coefficient for 0-based increasing coordinates `u` and resolutions `kappa`, both of length `len`.
 */
FoldnetStatus foldnet_gain_coefficient(const FoldnetPointSet *set,
                                       const size_t *u,
                                       const size_t *kappa,
                                       size_t len,
                                       double *out);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FOLDNET_H */
