#ifndef GCGS_H
#define GCGS_H

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum GcgsSolver {
  GCGS_SOLVER_CGS = 0,
  GCGS_SOLVER_CG = 1,
  // Elastic net only.
  GCGS_SOLVER_SPG = 2,
  // Elastic net only.
  GCGS_SOLVER_PG = 3,
} GcgsSolver;

typedef enum GcgsStep {
  GCGS_STEP_EXACT = 0,
  GCGS_STEP_ARMIJO = 1,
  GCGS_STEP_FIXED = 2,
} GcgsStep;

typedef enum GcgsStatus {
  GCGS_STATUS_OK = 0,
  GCGS_STATUS_NULL_POINTER = 1,
  GCGS_STATUS_INVALID_ARGUMENT = 2,
  GCGS_STATUS_DIMENSION = 3,
  GCGS_STATUS_NOT_CONVERGED = 4,
  GCGS_STATUS_SOLVE_FAILED = 5,
  GCGS_STATUS_BUFFER_TOO_SMALL = 6,
  GCGS_STATUS_PANIC = 7,
} GcgsStatus;

typedef enum GcgsLoss {
  GCGS_LOSS_SQUARED = 0,
  GCGS_LOSS_LOGISTIC = 1,
  GCGS_LOSS_SQUARED_HINGE = 2,
} GcgsLoss;

typedef enum GcgsTermination {
  GCGS_TERMINATION_GAP_TOL = 0,
  GCGS_TERMINATION_RESIDUAL_TOL = 1,
  GCGS_TERMINATION_MAX_ITER = 2,
  GCGS_TERMINATION_STALLED = 3,
} GcgsTermination;

typedef struct GcgsEnetProblem GcgsEnetProblem;

typedef struct GcgsOtProblem GcgsOtProblem;

typedef struct GcgsResult GcgsResult;

// Solver settings; start from [`gcgs_solver_options_default`].
typedef struct GcgsSolverOptions {
  enum GcgsSolver solver;
  enum GcgsStep step;
  size_t max_iter;
  // 0 disables the gap test.
  double gap_tol;
  bool gap_relative;
  // Negative disables the residual test.
  double residual_tol;
  double armijo_sigma;
  double armijo_beta;
} GcgsSolverOptions;

typedef struct GcgsIteration {
  size_t iter;
  double elapsed_s;
  double objective;
  double surrogate_gap;
  double step_alpha;
  // Marginal violation (transport) or fixed-point residual (elastic net);
  // NaN when not available.
  double residual;
} GcgsIteration;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Version string of the library; static storage.
const char *gcgs_version(void);

// Message for the last failed call on this thread, or NULL. The pointer is
// valid until the next library call on the same thread.
const char *gcgs_last_error_message(void);

struct GcgsSolverOptions gcgs_solver_options_default(void);

// Elastic-net problem over the `rows x cols` design `z` with labels `y`
// (length `rows`; ±1 for the classification losses).
//
// # Safety
// `z` must point to `rows * cols` doubles and `y` to `rows` doubles.
enum GcgsStatus gcgs_enet_problem_new(const double *z,
                                      size_t rows,
                                      size_t cols,
                                      const double *y,
                                      enum GcgsLoss loss,
                                      double lambda,
                                      double tau,
                                      struct GcgsEnetProblem **out);

// # Safety
// `problem` must be NULL or a handle from [`gcgs_enet_problem_new`] not yet freed.
void gcgs_enet_problem_free(struct GcgsEnetProblem *problem);

// Number of coefficients, or 0 for NULL.
//
// # Safety
// `problem` must be NULL or a live handle.
size_t gcgs_enet_problem_dim(const struct GcgsEnetProblem *problem);

// Solves from `x0` (NULL starts at zero).
//
// # Safety
// `problem` must be a live handle, `x0` NULL or of length
// [`gcgs_enet_problem_dim`], and `options` NULL or valid.
enum GcgsStatus gcgs_enet_solve(const struct GcgsEnetProblem *problem,
                                const double *x0,
                                const struct GcgsSolverOptions *options,
                                struct GcgsResult **out);

// Regularized transport problem on explicit data. `lap_s` (`ns x ns`),
// `lap_t` (`nt x nt`), `xs` (`ns x dim`) and `xt` (`nt x dim`) may all be
// NULL for a purely entropic problem; otherwise all four are required.
//
// # Safety
// Non-NULL pointers must reference arrays of the stated sizes.
enum GcgsStatus gcgs_ot_problem_new(const double *cost,
                                    size_t ns,
                                    size_t nt,
                                    const double *mu_s,
                                    const double *mu_t,
                                    double lambda_ent,
                                    double lambda_lap,
                                    const double *lap_s,
                                    const double *lap_t,
                                    const double *xs,
                                    const double *xt,
                                    size_t dim,
                                    struct GcgsOtProblem **out);

// The synthetic cluster experiment with `k`-nearest-neighbor Laplacians.
//
// # Safety
// `out` must be a valid pointer.
enum GcgsStatus gcgs_ot_problem_new_clusters(size_t ns,
                                             size_t nt,
                                             size_t clusters,
                                             double noise,
                                             uint64_t seed,
                                             double lambda_ent,
                                             double lambda_lap,
                                             size_t k,
                                             struct GcgsOtProblem **out);

// # Safety
// `problem` must be NULL or a live handle.
void gcgs_ot_problem_free(struct GcgsOtProblem *problem);

// # Safety
// `problem` must be a live handle; `ns` and `nt` may be NULL.
enum GcgsStatus gcgs_ot_problem_shape(const struct GcgsOtProblem *problem, size_t *ns, size_t *nt);

// Objective at the `ns x nt` plan `gamma`.
//
// # Safety
// `problem` must be a live handle, `gamma` of length `ns * nt`, `value` valid.
enum GcgsStatus gcgs_ot_objective(const struct GcgsOtProblem *problem,
                                  const double *gamma,
                                  double *value);

// Solves from `gamma0` (NULL starts at the entropic plan of the cost).
// Only [`GcgsSolver::Cgs`] and [`GcgsSolver::Cg`] apply.
//
// # Safety
// `problem` must be a live handle, `gamma0` NULL or of length `ns * nt`,
// `options` NULL or valid.
enum GcgsStatus gcgs_ot_solve(const struct GcgsOtProblem *problem,
                              const double *gamma0,
                              const struct GcgsSolverOptions *options,
                              struct GcgsResult **out);

// # Safety
// `result` must be NULL or a live handle.
void gcgs_result_free(struct GcgsResult *result);

// Length of the final iterate, or 0 for NULL.
//
// # Safety
// `result` must be NULL or a live handle.
size_t gcgs_result_dim(const struct GcgsResult *result);

// Copies the final iterate into `buf` (capacity `len`).
//
// # Safety
// `result` must be a live handle and `buf` writable for `len` doubles.
enum GcgsStatus gcgs_result_x(const struct GcgsResult *result, double *buf, size_t len);

// # Safety
// `result` must be a live handle; `termination` valid.
enum GcgsStatus gcgs_result_termination(const struct GcgsResult *result,
                                        enum GcgsTermination *termination);

// Number of recorded iterates (steps taken + 1), or 0 for NULL.
//
// # Safety
// `result` must be NULL or a live handle.
size_t gcgs_result_trace_len(const struct GcgsResult *result);

// Row `index` of the trace; the last row is the final iterate.
//
// # Safety
// `result` must be a live handle and `row` valid.
enum GcgsStatus gcgs_result_trace_row(const struct GcgsResult *result,
                                      size_t index,
                                      struct GcgsIteration *row);

// Euclidean projection of `v` onto `{x : ‖x‖₁ ≤ tau}`.
//
// # Safety
// `v` and `out` must each hold `n` doubles; they may alias.
enum GcgsStatus gcgs_project_l1(const double *v, size_t n, double tau, double *out);

// Entropic transport plan `argmin ⟨γ, C⟩ + λ Σ γ log γ` over the couplings
// of `mu_s` and `mu_t`, written row-major into `plan`.
//
// # Safety
// `cost` and `plan` must hold `ns * nt` doubles, `mu_s` `ns`, `mu_t` `nt`.
enum GcgsStatus gcgs_sinkhorn(const double *cost,
                              size_t ns,
                              size_t nt,
                              const double *mu_s,
                              const double *mu_t,
                              double lambda,
                              double tol,
                              size_t max_iter,
                              double *plan);

// A vertex minimizer of `⟨γ, C⟩` over the couplings of `mu_s` and `mu_t`.
//
// # Safety
// `cost` and `plan` must hold `ns * nt` doubles, `mu_s` `ns`, `mu_t` `nt`.
enum GcgsStatus gcgs_transport_lmo(const double *cost,
                                   size_t ns,
                                   size_t nt,
                                   const double *mu_s,
                                   const double *mu_t,
                                   double *plan);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* GCGS_H */
