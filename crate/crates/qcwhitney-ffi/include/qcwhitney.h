#ifndef QCWHITNEY_H
#define QCWHITNEY_H

/* Generated by cbindgen from qcwhitney-ffi; do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stdint.h>
#include <stdlib.h>

/**
 * Status of a call. `Ok` is zero; everything else names the failure.
 */
typedef enum QcwStatus {
  QcwStatus_Ok = 0,
  QcwStatus_NullArgument = 1,
  QcwStatus_DegenerateBody = 2,
  QcwStatus_Containment = 3,
  QcwStatus_InvalidRing = 4,
  QcwStatus_UnsupportedDimension = 5,
  QcwStatus_MapUndefined = 6,
  QcwStatus_InconsistentOracle = 7,
  QcwStatus_InvalidCondenser = 8,
  QcwStatus_NonConvergence = 9,
  QcwStatus_OutOfDomain = 10,
  QcwStatus_Config = 11,
  QcwStatus_Io = 12,
  QcwStatus_Panic = 13,
} QcwStatus;

/**
 * Opaque domain handle.
 */
typedef struct QcwDomain QcwDomain;

/**
 * Opaque Whitney family handle.
 */
typedef struct QcwFamily QcwFamily;

/**
 * Family metrics. Ratio and dilatation fields are NaN for an empty
 * family.
 */
typedef struct QcwMetrics {
  double min_ratio;
  double max_ratio;
  double max_interior_dilatation;
  double coverage_fraction;
  uintptr_t cell_count;
} QcwMetrics;

/**
 * Grid capacity result. `value` is +infinity when the plates collide.
 */
typedef struct QcwCapacity {
  double value;
  uint64_t iterations;
  double residual;
} QcwCapacity;

/**
 * The explicit constants for given (Q, C_r, n, Cn).
 */
typedef struct QcwBounds {
  /**
   * Cap on the dilatation of mapped balls (+infinity sentinel possible).
   */
  double k_r_bound;
  /**
   * Cap on diameter/distance of mapped balls, at dilatation 1.
   */
  double delta_upper_factor;
  double c0;
  /**
   * Floor for diameter/distance of mapped balls.
   */
  double c3;
} QcwBounds;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Look up a catalog domain ("square", "cube", "disk", "ball", "lshape",
 * "stadium") in the given dimension. Returns null on failure.
 */
struct QcwDomain *qcw_domain_by_name(const char *name, uintptr_t dim, enum QcwStatus *status);

/**
 * Axis-aligned box domain from corner coordinate arrays of length `dim`.
 */
struct QcwDomain *qcw_domain_box(const double *lo,
                                 const double *hi,
                                 uintptr_t dim,
                                 enum QcwStatus *status);

void qcw_domain_free(struct QcwDomain *domain);

uintptr_t qcw_domain_dim(const struct QcwDomain *domain);

/**
 * Signed distance to the domain complement at a point of length `dim`
 * (positive inside). NaN on bad arguments.
 */
double qcw_domain_distance(const struct QcwDomain *domain, const double *point, uintptr_t dim);

/**
 * Whitney decomposition of a bounded domain down to `max_level`.
 */
struct QcwFamily *qcw_decompose(const struct QcwDomain *domain,
                                uint32_t max_level,
                                enum QcwStatus *status);

void qcw_family_free(struct QcwFamily *family);

uintptr_t qcw_family_cell_count(const struct QcwFamily *family);

/**
 * Level and dyadic index of cell `i`. `index` must hold `dim` entries.
 */
enum QcwStatus qcw_family_cell(const struct QcwFamily *family,
                               uintptr_t i,
                               uint32_t *level,
                               int64_t *index);

/**
 * Exact metrics of a decomposition (ratios, dilatation, probed coverage).
 */
enum QcwStatus qcw_family_metrics(const struct QcwFamily *family, struct QcwMetrics *out);

/**
 * Closed-form capacity of the ring condenser (inner radius r, outer R) in
 * dimension n, at the conformal exponent p = n.
 */
double qcw_ring_capacity_exact(double r, double big_r, uintptr_t n, enum QcwStatus *status);

/**
 * Grid estimate of the ring capacity. `center` has `dim` coordinates.
 * Non-convergence fills `out` with the partial estimate and returns the
 * matching status.
 */
enum QcwStatus qcw_ring_capacity_grid(const double *center,
                                      uintptr_t dim,
                                      double r,
                                      double big_r,
                                      double p,
                                      double h,
                                      double tol,
                                      uint64_t max_iter,
                                      struct QcwCapacity *out);

/**
 * The explicit constants for a map of distortion `q` and a ball of
 * embedding coefficient `c_r` in dimension `n`, with capacity constant
 * `cn` = 1/K(n).
 */
enum QcwStatus qcw_bounds(double q, double c_r, uintptr_t n, double cn, struct QcwBounds *out);

/**
 * Static name of a status code.
 */
const char *qcw_status_name(enum QcwStatus status);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* QCWHITNEY_H */
