#ifndef FUNK_H
#define FUNK_H

/* Generated by cbindgen from src/lib.rs. Do not edit. */

#include <stdbool.h>
#include <stddef.h>

typedef enum FunkStatus {
  FUNK_STATUS_OK = 0,
  FUNK_STATUS_NULL_POINTER = 1,
  FUNK_STATUS_INVALID_UTF8 = 2,
  FUNK_STATUS_INVALID_BODY = 3,
  FUNK_STATUS_DIMENSION_MISMATCH = 4,
  FUNK_STATUS_POINT_OUTSIDE = 5,
  FUNK_STATUS_INVALID_ARGUMENT = 6,
  FUNK_STATUS_BUFFER_TOO_SMALL = 7,
  FUNK_STATUS_NUMERICAL = 8,
  FUNK_STATUS_PANIC = 9,
} FunkStatus;

typedef enum FunkSide {
  FUNK_SIDE_FORWARD = 0,
  FUNK_SIDE_BACKWARD = 1,
} FunkSide;

/**
 * Opaque body handle.
 */
typedef struct FunkBody FunkBody;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. Valid until the
 * next call on the same thread.
 */
const char *funk_last_error(void);

/**
 * Builds a body from a nul-terminated JSON document.
 *
 * # Safety
 * `json` must be a valid C string and `out` a writable pointer. The handle
 * written to `out` must be released with [`funk_body_free`].
 */
enum FunkStatus funk_body_from_json(const char *json, struct FunkBody **out);

/**
 * # Safety
 * `body` must be null or a handle not yet freed.
 */
void funk_body_free(struct FunkBody *body);

/**
 * Ambient dimension, or 0 for a null handle.
 *
 * # Safety
 * `body` must be null or a live handle.
 */
size_t funk_body_dimension(const struct FunkBody *body);

/**
 * # Safety
 * `p` must point to `n` doubles and `out` be writable.
 */
enum FunkStatus funk_body_contains(const struct FunkBody *body,
                                   const double *p,
                                   size_t n,
                                   bool *out);

/**
 * Exit parameter of `x + tξ`; `INFINITY` when the ray stays inside.
 *
 * # Safety
 * `x` and `xi` must point to `n` doubles and `t_out` be writable.
 */
enum FunkStatus funk_ray_boundary(const struct FunkBody *body,
                                  const double *x,
                                  const double *xi,
                                  size_t n,
                                  double *t_out);

/**
 * Minkowski gauge of `ξ` at `x`.
 *
 * # Safety
 * `x` and `xi` must point to `n` doubles and `out` be writable.
 */
enum FunkStatus funk_gauge(const struct FunkBody *body,
                           const double *x,
                           const double *xi,
                           size_t n,
                           double *out);

/**
 * Funk distance `F(x, y)`.
 *
 * # Safety
 * `x` and `y` must point to `n` doubles and `out` be writable.
 */
enum FunkStatus funk_distance(const struct FunkBody *body,
                              const double *x,
                              const double *y,
                              size_t n,
                              double *out);

/**
 * Samples a sphere of radius `delta` about `x` into `buffer`, row-major with
 * `n` doubles per point.
 *
 * `points_out` receives the number of points produced. If `buffer_len` is
 * too small nothing is copied, `points_out` still holds the required count
 * and the call returns `BufferTooSmall`.
 *
 * # Safety
 * `x` must point to `n` doubles, `buffer` to `buffer_len` writable doubles
 * (it may be null when `buffer_len` is 0), `points_out` and `truncated_out`
 * must be writable.
 */
enum FunkStatus funk_sphere(const struct FunkBody *body,
                            const double *x,
                            size_t n,
                            double delta,
                            enum FunkSide side,
                            size_t dirs,
                            double *buffer,
                            size_t buffer_len,
                            size_t *points_out,
                            bool *truncated_out);

/**
 * Version string of the library, static.
 */
const char *funk_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUNK_H */
