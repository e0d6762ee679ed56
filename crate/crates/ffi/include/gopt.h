#ifndef GOPT_H
#define GOPT_H

/* Generated by cbindgen from crates/ffi/src/lib.rs. Do not edit. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

typedef enum GoptPenalty {
  GOPT_PENALTY_TV = 0,
  GOPT_PENALTY_PTV = 1,
} GoptPenalty;

typedef enum GoptStatus {
  GOPT_STATUS_OK = 0,
  GOPT_STATUS_NULL_POINTER = 1,
  GOPT_STATUS_INVALID_ARGUMENT = 2,
  GOPT_STATUS_DIMENSION_MISMATCH = 3,
  GOPT_STATUS_UNSUPPORTED = 4,
  GOPT_STATUS_UNBALANCED = 5,
  GOPT_STATUS_LP_FAILURE = 6,
  /**
   * The requested quantity is not produced by this solver.
   */
  GOPT_STATUS_UNAVAILABLE = 7,
  GOPT_STATUS_BUFFER_TOO_SMALL = 8,
  GOPT_STATUS_INTERNAL = 9,
  GOPT_STATUS_PANIC = 10,
} GoptStatus;

/**
 * Opaque GOPT problem.
 */
typedef struct GoptProblemHandle GoptProblemHandle;

/**
 * Opaque solver report.
 */
typedef struct GoptReportHandle GoptReportHandle;

/**
 * Objective split into transport cost and the two marginal penalties.
 * Infinite penalties are reported as `INFINITY`.
 */
typedef struct GoptObjective {
  double transport;
  double penalty1;
  double penalty2;
  double total;
} GoptObjective;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Library version as a static NUL-terminated string.
 */
const char *gopt_version(void);

/**
 * Message of the last failed call on this thread, or NULL if none.
 * The pointer stays valid until the next failing call on this thread.
 */
const char *gopt_last_error_message(void);

/**
 * Static name of a status code.
 */
const char *gopt_status_name(enum GoptStatus status);

/**
 * Build a GOPT problem. `cost` is `n * m` row-major, `p`/`lambda1` have
 * `n` entries and `q`/`lambda2` have `m`.
 *
 * # Safety
 * Every array pointer must be valid for reads of its stated length and
 * `out` must be valid for one pointer write.
 */
enum GoptStatus gopt_problem_new(const double *cost,
                                 size_t n,
                                 size_t m,
                                 const double *p,
                                 const double *q,
                                 const double *lambda1,
                                 const double *lambda2,
                                 enum GoptPenalty penalty1,
                                 enum GoptPenalty penalty2,
                                 struct GoptProblemHandle **out);

/**
 * # Safety
 * `problem` must be NULL or a handle from [`gopt_problem_new`] not yet freed.
 */
void gopt_problem_free(struct GoptProblemHandle *problem);

/**
 * Entropic solver at regularization `epsilon`. `max_iters == 0` and
 * `tol <= 0` select the defaults.
 *
 * # Safety
 * `problem` must be a live problem handle and `out` valid for one write.
 */
enum GoptStatus gopt_solve_sinkhorn(const struct GoptProblemHandle *problem,
                                    double epsilon,
                                    size_t max_iters,
                                    double tol,
                                    struct GoptReportHandle **out);

/**
 * Exact solver through the balanced-transport reduction (PTV only).
 *
 * # Safety
 * `problem` must be a live problem handle and `out` valid for one write.
 */
enum GoptStatus gopt_solve_lp(const struct GoptProblemHandle *problem,
                              struct GoptReportHandle **out);

/**
 * Exact solver through the dense reference simplex (TV and PTV).
 *
 * # Safety
 * `problem` must be a live problem handle and `out` valid for one write.
 */
enum GoptStatus gopt_solve_oracle(const struct GoptProblemHandle *problem,
                                  struct GoptReportHandle **out);

/**
 * Mass-constrained transport `sum gamma = eta` by the exact reduction.
 *
 * # Safety
 * Array pointers must be valid for their lengths; `out` valid for one write.
 */
enum GoptStatus gopt_solve_mopt_lp(const double *cost,
                                   size_t n,
                                   size_t m,
                                   const double *p,
                                   const double *q,
                                   double eta,
                                   double alpha,
                                   double beta,
                                   struct GoptReportHandle **out);

/**
 * Entropic mass-constrained transport by Dykstra's algorithm.
 *
 * # Safety
 * Array pointers must be valid for their lengths; `out` valid for one write.
 */
enum GoptStatus gopt_solve_mopt_dykstra(const double *cost,
                                        size_t n,
                                        size_t m,
                                        const double *p,
                                        const double *q,
                                        double eta,
                                        double epsilon,
                                        size_t max_iters,
                                        double tol,
                                        struct GoptReportHandle **out);

/**
 * Semi-constrained transport: column marginal `= q`, row marginal `<= p`.
 *
 * # Safety
 * Array pointers must be valid for their lengths; `out` valid for one write.
 */
enum GoptStatus gopt_solve_sopt(const double *cost,
                                size_t n,
                                size_t m,
                                const double *p,
                                const double *q,
                                struct GoptReportHandle **out);

/**
 * # Safety
 * `report` must be NULL or a report handle not yet freed.
 */
void gopt_report_free(struct GoptReportHandle *report);

/**
 * # Safety
 * `report` must be a live report handle; `out` valid for one write.
 */
enum GoptStatus gopt_report_objective(const struct GoptReportHandle *report,
                                      struct GoptObjective *out);

/**
 * Plan dimensions.
 *
 * # Safety
 * `report` must be a live report handle; `rows`, `cols` valid for writes.
 */
enum GoptStatus gopt_report_shape(const struct GoptReportHandle *report,
                                  size_t *rows,
                                  size_t *cols);

/**
 * Copy the plan, row-major, into `buffer` of `len >= rows * cols` doubles.
 *
 * # Safety
 * `report` must be a live report handle; `buffer` valid for `len` writes.
 */
enum GoptStatus gopt_report_plan(const struct GoptReportHandle *report, double *buffer, size_t len);

/**
 * Value the solver minimized (entropic objective for scaling solvers).
 *
 * # Safety
 * `report` must be a live report handle; `out` valid for one write.
 */
enum GoptStatus gopt_report_primal(const struct GoptReportHandle *report, double *out);

/**
 * Dual value; `GOPT_STATUS_UNAVAILABLE` for solvers without a certificate.
 *
 * # Safety
 * `report` must be a live report handle; `out` valid for one write.
 */
enum GoptStatus gopt_report_dual(const struct GoptReportHandle *report, double *out);

/**
 * Duality gap; `GOPT_STATUS_UNAVAILABLE` for solvers without a certificate.
 *
 * # Safety
 * `report` must be a live report handle; `out` valid for one write.
 */
enum GoptStatus gopt_report_gap(const struct GoptReportHandle *report, double *out);

/**
 * # Safety
 * `report` must be a live report handle; `iterations`, `converged` valid
 * for writes.
 */
enum GoptStatus gopt_report_status(const struct GoptReportHandle *report,
                                   size_t *iterations,
                                   bool *converged);

/**
 * Static name of the solver that produced the report.
 *
 * # Safety
 * `report` must be NULL or a live report handle.
 */
const char *gopt_report_solver(const struct GoptReportHandle *report);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GOPT_H */
