#ifndef VEIN_H
#define VEIN_H

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum {
  VEIN_STATUS_OK = 0,
  VEIN_STATUS_NULL_POINTER = 1,
  VEIN_STATUS_INVALID_UTF8 = 2,
  VEIN_STATUS_PARSE_ERROR = 3,
  VEIN_STATUS_INVALID_BODY = 4,
  VEIN_STATUS_DIMENSION_MISMATCH = 5,
  VEIN_STATUS_NON_FINITE = 6,
  VEIN_STATUS_DOMAIN = 7,
  VEIN_STATUS_NUMERICAL = 8,
  VEIN_STATUS_BUFFER_TOO_SMALL = 9,
  VEIN_STATUS_PANIC = 10,
} VeinStatus;

/**
 * Opaque body handle.
 */
typedef struct VeinBody VeinBody;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Parses a JSON body description into a new handle stored in `*out`.
 *
 * # Safety
 * `json` must be a NUL-terminated string and `out` a valid pointer.
 */
VeinStatus vein_body_from_json(const char *json, VeinBody **out);

/**
 * Releases a handle. Null is ignored.
 *
 * # Safety
 * `body` must come from `vein_body_from_json` and not be used afterwards.
 */
void vein_body_free(VeinBody *body);

/**
 * # Safety
 * Pointers must be valid.
 */
VeinStatus vein_body_dim(const VeinBody *body, size_t *out);

/**
 * Gauge `‖x‖_K` of a point of length `len`.
 *
 * # Safety
 * `x` must point to `len` doubles; other pointers must be valid.
 */
VeinStatus vein_gauge(const VeinBody *body, const double *x, size_t len, double *out);

/**
 * Support function `h_K(u)`.
 *
 * # Safety
 * `u` must point to `len` doubles; other pointers must be valid.
 */
VeinStatus vein_support(const VeinBody *body, const double *u, size_t len, double *out);

/**
 * Best closed-form enclosing point set. Points are written row-major into
 * `points` (may be null to query the length through `out_len`).
 *
 * # Safety
 * `points` must hold `capacity` doubles when non-null; other pointers must
 * be valid.
 */
VeinStatus vein_known_witness(const VeinBody *body,
                              double *out_objective,
                              double *points,
                              size_t capacity,
                              size_t *out_len);

/**
 * Upper bound from the witness and searches over `n_min..=n_max` vertices.
 *
 * # Safety
 * As for `vein_known_witness`.
 */
VeinStatus vein_search(const VeinBody *body,
                       size_t n_min,
                       size_t n_max,
                       size_t restarts,
                       uint64_t seed,
                       double *out_objective,
                       double *points,
                       size_t capacity,
                       size_t *out_len);

/**
 * Best lower certificate and best constructive upper bound.
 *
 * # Safety
 * Pointers must be valid.
 */
VeinStatus vein_bounds(const VeinBody *body, uint64_t seed, double *out_lower, double *out_upper);

/**
 * Certified ratio `√d` of the Sylvester–Hadamard witness for `d = 2^m`.
 *
 * # Safety
 * `out` must be valid.
 */
VeinStatus vein_hadamard_ratio(uint32_t m, double *out);

/**
 * Message for the last failed call on this thread, or null. The pointer
 * stays valid until the next call into the library from the same thread.
 */
const char *vein_last_error(void);

/**
 * Library version, NUL-terminated and static.
 */
const char *vein_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* VEIN_H */
