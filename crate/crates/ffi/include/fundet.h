#ifndef FUNDET_H
#define FUNDET_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum FdStatus {
  FD_STATUS_OK = 0,
  FD_STATUS_INVALID_ARGUMENT = 1,
  /**
   * The operator has a zero mode (or the Green kernel does not exist).
   */
  FD_STATUS_DEGENERATE = 2,
  FD_STATUS_NUMERICAL_FAILURE = 3,
  FD_STATUS_NULL_POINTER = 4,
  FD_STATUS_PANIC = 5,
} FdStatus;

/**
 * Green function of one profile and boundary condition.
 */
typedef struct FdGreen FdGreen;

/**
 * A frequency profile `Ω²(t)` on `[t_a, t_b]`.
 */
typedef struct FdProfile FdProfile;

/**
 * Boundary condition selector: one of the `FD_BC_*` constants.
 */
typedef uint32_t FdBoundary;

typedef struct FdDetResult {
  double value;
  double ratio;
  double wronskian;
  double endpoint_det;
  double monodromy_trace;
  /**
   * Nonzero when the operator has a zero mode to working accuracy.
   */
  int32_t degenerate;
} FdDetResult;

#define FD_BC_DIRICHLET 0

#define FD_BC_PERIODIC 1

#define FD_BC_ANTIPERIODIC 2

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * `Ω² ≡ omega²` on `[t_a, t_b]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum FdStatus fd_profile_constant(double omega, double t_a, double t_b, struct FdProfile **out);

/**
 * `Ω² = omega²(1 + eps·sin(nu·t))` on `[t_a, t_b]`.
 *
 * # Safety
 * `out` must be valid for writes.
 */
enum FdStatus fd_profile_modulated(double omega,
                                   double eps,
                                   double nu,
                                   double t_a,
                                   double t_b,
                                   struct FdProfile **out);

/**
 * Profile from a JSON description such as `{"kind":"constant","omega":1.0}`.
 *
 * # Safety
 * `json` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum FdStatus fd_profile_from_json(const char *json,
                                   double t_a,
                                   double t_b,
                                   struct FdProfile **out);

/**
 * Profile `Ω² = −ξ̈/ξ` built from a named zero-mode shape (e.g. `"sinpi"`).
 *
 * # Safety
 * `name` must be a NUL-terminated string; `out` must be valid for writes.
 */
enum FdStatus fd_profile_synthetic(const char *name,
                                   double t_a,
                                   double t_b,
                                   struct FdProfile **out);

/**
 * # Safety
 * `p` must come from an `fd_profile_*` constructor and not be used afterwards.
 */
void fd_profile_free(struct FdProfile *p);

/**
 * Determinant and ratio. For a degenerate operator the call succeeds with
 * `degenerate` set.
 *
 * # Safety
 * `p` must be a live profile handle and `out` valid for writes.
 */
enum FdStatus fd_det(const struct FdProfile *p,
                     FdBoundary bc,
                     double omega0,
                     struct FdDetResult *out);

/**
 * Regularized Dirichlet determinant `⟨ξ|ξ⟩/(ξ̇_a ξ̇_b)` of an operator with a
 * zero mode.
 *
 * # Safety
 * `p` must be a live profile handle and `out` valid for writes.
 */
enum FdStatus fd_det_regularized(const struct FdProfile *p, double *out);

/**
 * # Safety
 * `p` must be a live profile handle and `out` valid for writes.
 */
enum FdStatus fd_green_new(const struct FdProfile *p, FdBoundary bc, struct FdGreen **out);

/**
 * `G(t, t′)`; the diagonal uses the average of the one-sided limits.
 *
 * # Safety
 * `g` must be a live Green handle and `out` valid for writes.
 */
enum FdStatus fd_green_eval(const struct FdGreen *g, double t, double t_prime, double *out);

/**
 * # Safety
 * `g` must come from `fd_green_new` and not be used afterwards.
 */
void fd_green_free(struct FdGreen *g);

/**
 * Finite-difference ratio on `n` lattice points.
 *
 * # Safety
 * `p` must be a live profile handle and `out` valid for writes.
 */
enum FdStatus fd_lattice_ratio(const struct FdProfile *p,
                               FdBoundary bc,
                               double omega0,
                               size_t n,
                               double *out);

/**
 * Ratio from the coupling-constant flow with `g_steps` Gauss nodes.
 *
 * # Safety
 * `p` must be a live profile handle and `out` valid for writes.
 */
enum FdStatus fd_gflow_ratio(const struct FdProfile *p,
                             FdBoundary bc,
                             double omega0,
                             size_t g_steps,
                             double *out);

/**
 * Copies the calling thread's last error message into `buf` (truncated,
 * always NUL-terminated when `len > 0`). Returns the full length including
 * the terminator, so a call with `len = 0` sizes the buffer.
 *
 * # Safety
 * `buf` must be valid for `len` bytes of writes, or null when `len` is 0.
 */
size_t fd_last_error_message(char *buf, size_t len);

/**
 * Library version as a static NUL-terminated string.
 */
const char *fd_version(void);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* FUNDET_H */
