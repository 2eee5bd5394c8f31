#ifndef STABCAST_H
#define STABCAST_H

/* Generated by cbindgen from crates/ffi/src/lib.rs; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum StabcastStatus {
  STABCAST_STATUS_OK = 0,
  STABCAST_STATUS_NULL_POINTER = 1,
  STABCAST_STATUS_INVALID_ARGUMENT = 2,
  STABCAST_STATUS_DOMAIN = 3,
  /**
   * The result is mathematically undefined (zero scale, all pairs tied).
   */
  STABCAST_STATUS_UNDEFINED = 4,
  /**
   * A panic was caught inside the library.
   */
  STABCAST_STATUS_INTERNAL = 5,
} StabcastStatus;

/**
 * Values accepted by the `method` arguments.
 */
typedef enum StabcastMethod {
  STABCAST_METHOD_PARTIAL = 0,
  STABCAST_METHOD_FULL = 1,
} StabcastMethod;

/**
 * Values accepted by the `order` argument of [`stabcast_stabilize_joint`].
 */
typedef enum StabcastJointOrder {
  STABCAST_JOINT_ORDER_VERTICAL_THEN_HORIZONTAL = 0,
  STABCAST_JOINT_ORDER_HORIZONTAL_THEN_VERTICAL = 1,
} StabcastJointOrder;

/**
 * Values accepted by the `kind` argument of [`stabcast_accuracy`].
 */
typedef enum StabcastAccuracy {
  STABCAST_ACCURACY_MASE = 0,
  STABCAST_ACCURACY_RMSSE = 1,
  STABCAST_ACCURACY_SMAPE = 2,
} StabcastAccuracy;

/**
 * Opaque rolling-origin forecast matrix.
 */
typedef struct StabcastMatrix StabcastMatrix;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Message of the last failed call on this thread, or null. The pointer is
 * valid until the next library call on the same thread.
 */
const char *stabcast_last_error(void);

/**
 * Creates a matrix from `origins * horizon` row-major values. Row `k`
 * (0-based) holds the forecasts made at time `first_origin + k`.
 *
 * # Safety
 * `values` must point to `origins * horizon` doubles; `out` must be
 * writable.
 */
enum StabcastStatus stabcast_matrix_new(const double *values,
                                        size_t origins,
                                        size_t horizon,
                                        size_t first_origin,
                                        struct StabcastMatrix **out);

/**
 * Releases a matrix; null is ignored.
 *
 * # Safety
 * `matrix` must be null or a handle from this library not yet freed.
 */
void stabcast_matrix_free(struct StabcastMatrix *matrix);

/**
 * # Safety
 * `matrix` must be a live handle; `origins` and `horizon` writable.
 */
enum StabcastStatus stabcast_matrix_shape(const struct StabcastMatrix *matrix,
                                          size_t *origins,
                                          size_t *horizon);

/**
 * Copies the row-major values into `out`, which holds `len` doubles.
 *
 * # Safety
 * `matrix` must be a live handle; `out` must point to `len` writable
 * doubles.
 */
enum StabcastStatus stabcast_matrix_values(const struct StabcastMatrix *matrix,
                                           double *out,
                                           size_t len);

/**
 * Vertical stabilization across origins.
 *
 * # Safety
 * `matrix` must be a live handle; `out` writable.
 */
enum StabcastStatus stabcast_stabilize_vertical(const struct StabcastMatrix *matrix,
                                                double w,
                                                uint32_t method_kind,
                                                struct StabcastMatrix **out);

/**
 * Horizontal stabilization of one forecast vector into `out` (`len`
 * doubles, may alias `row`).
 *
 * # Safety
 * `row` and `out` must each point to `len` doubles.
 */
enum StabcastStatus stabcast_stabilize_horizontal(const double *row,
                                                  size_t len,
                                                  double w,
                                                  uint32_t method_kind,
                                                  double *out);

/**
 * Sequential vertical and horizontal stabilization.
 *
 * # Safety
 * `matrix` must be a live handle; `out` writable.
 */
enum StabcastStatus stabcast_stabilize_joint(const struct StabcastMatrix *matrix,
                                             double w_vertical,
                                             double w_horizontal,
                                             uint32_t order,
                                             uint32_t method_kind,
                                             struct StabcastMatrix **out);

/**
 * Scaled accuracy of `h` forecasts against actuals, scaled by the
 * seasonal naive error of `training` with period `m`. Returns
 * `Undefined` when the scale is zero.
 *
 * # Safety
 * `actuals` and `forecasts` must point to `h` doubles, `training` to
 * `training_len` doubles; `out` writable.
 */
enum StabcastStatus stabcast_accuracy(uint32_t kind,
                                      const double *actuals,
                                      const double *forecasts,
                                      size_t h,
                                      const double *training,
                                      size_t training_len,
                                      size_t m,
                                      double *out);

/**
 * `alpha / comparisons`.
 *
 * # Safety
 * `out` must be writable.
 */
enum StabcastStatus stabcast_bonferroni(double alpha, size_t comparisons, double *out);

/**
 * Two-sided Wilcoxon signed-rank p-value of paired samples. Returns
 * `Undefined` when every pair is tied.
 *
 * # Safety
 * `a` and `b` must point to `n` doubles; `p_value` writable.
 */
enum StabcastStatus stabcast_wilcoxon(const double *a, const double *b, size_t n, double *p_value);

/**
 * Knee of the accuracy/stability front of `n` points. Writes the index of
 * the selected input point; `degenerate` (nullable) is set to 1 when the
 * front has no knee and the most accurate point was chosen.
 *
 * # Safety
 * `accuracy` and `stability` must point to `n` doubles; `index` writable;
 * `degenerate` null or writable.
 */
enum StabcastStatus stabcast_pareto_select(const double *accuracy,
                                           const double *stability,
                                           size_t n,
                                           size_t *index,
                                           int32_t *degenerate);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* STABCAST_H */
