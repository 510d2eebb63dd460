/*
 * C interface to the pipg solver library.
 *
 * The library solves equality-constrained QPs over simple convex sets,
 *   minimize 0.5 z'Hz + h'z  subject to  Gz = g, z in Z,
 * with a proportional-integral projected gradient method (one projection onto
 * Z per iteration, constant or varying step sizes) plus baseline primal-dual
 * solvers (dual fast gradient, ADMM, Chambolle-Pock constant/accelerated),
 * and ships the trajectory-planning benchmark harness built on them.
 *
 * All objects are opaque handles created and destroyed through this API.
 * Functions return PIPG_OK on success; on failure they return a status code
 * and leave a human-readable message in pipg_last_error() (thread-local).
 * Output buffers are caller-allocated with the documented lengths.
 */

#ifndef PIPG_H
#define PIPG_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum pipg_status {
  PIPG_OK = 0,
  PIPG_ERR_ARGUMENT = 1,      /* null pointer or out-of-range argument */
  PIPG_ERR_DIMENSION = 2,     /* dimension mismatch */
  PIPG_ERR_CONFIG = 3,        /* invalid solver or experiment configuration */
  PIPG_ERR_UNSUPPORTED = 4,   /* method cannot handle this problem class */
  PIPG_ERR_PARSE = 5,         /* malformed JSON input */
  PIPG_ERR_NUMERICAL = 6,     /* non-finite iterates or failed iteration */
  PIPG_ERR_FACTORIZATION = 7, /* singular saddle system (rank-deficient G) */
  PIPG_ERR_CERTIFICATION = 8, /* reference solution failed certification */
  PIPG_ERR_IO = 9,            /* file could not be read or written */
  PIPG_ERR_INTERNAL = 10
} pipg_status;

typedef struct pipg_problem pipg_problem;
typedef struct pipg_solution pipg_solution;
typedef struct pipg_reference pipg_reference;

const char* pipg_version(void);
const char* pipg_status_string(pipg_status status);

/* Message describing the most recent failure on the calling thread. */
const char* pipg_last_error(void);

/* -------- problems -------- */

/* Problem documents are JSON objects {"H": rows, "h": [...], "G": rows,
 * "g": [...], "set": descriptor} with dense row-major matrices. */
pipg_status pipg_problem_from_json(const char* text, pipg_problem** out);
pipg_status pipg_problem_from_json_file(const char* path, pipg_problem** out);
pipg_status pipg_problem_to_json_file(const pipg_problem* problem, const char* path);

/* The lifted trajectory-planning benchmark with the given horizon. */
pipg_status pipg_benchmark_problem(int horizon, pipg_problem** out);

void pipg_problem_free(pipg_problem* problem);

ptrdiff_t pipg_problem_num_vars(const pipg_problem* problem);
ptrdiff_t pipg_problem_num_constraints(const pipg_problem* problem);

pipg_status pipg_problem_objective(const pipg_problem* problem, const double* z, ptrdiff_t n,
                                   double* value);

/* residuals[0] = ||Gz - g||, residuals[1] = ||z - proj_Z(z)||,
 * residuals[2] = projected-gradient stationarity residual. */
pipg_status pipg_problem_kkt_residual(const pipg_problem* problem, const double* z, ptrdiff_t n,
                                      const double* w, ptrdiff_t m, double residuals[3]);

/* -------- solving -------- */

typedef struct pipg_solve_options {
  const char* solver;   /* pipg-var | pipg-const | dfg | admm | cp-const | cp-accel */
  long max_iterations;  /* iteration cap; exhaustion is a normal return */
  double feas_tol_inf;  /* stop when ||Gz-g||_inf <= this; <= 0 disables */
  int stop_on;          /* iterate the tolerance reads: 0 raw, 1 hat avg, 2 tilde avg */
  double admm_alpha;    /* ADMM penalty parameter */
  double dfg_inner_tol; /* relative inner-loop tolerance, in (0,1) */
  double pipg_beta;     /* constant-schedule beta; <= 0 picks sqrt(lambda/sigma) */
  int record_trace;     /* nonzero: keep per-iteration records */
  long trace_stride;    /* record every stride-th iteration */
} pipg_solve_options;

/* Fills in the defaults: pipg-var, 100000 iterations, stop on the raw
 * iterate, alpha = 2, inner tol 1e-3, no trace. */
void pipg_solve_options_init(pipg_solve_options* options);

/* z0 (length n) and w0 (length m) may be NULL for zero initialization. A
 * reference handle adds distance columns to the recorded trace. */
pipg_status pipg_solve(const pipg_problem* problem, const pipg_solve_options* options,
                       const double* z0, const double* w0, const pipg_reference* reference,
                       pipg_solution** out);

ptrdiff_t pipg_solution_num_vars(const pipg_solution* solution);
ptrdiff_t pipg_solution_num_constraints(const pipg_solution* solution);
pipg_status pipg_solution_primal(const pipg_solution* solution, double* z, ptrdiff_t n);
pipg_status pipg_solution_primal_average(const pipg_solution* solution, double* z, ptrdiff_t n);
pipg_status pipg_solution_dual(const pipg_solution* solution, double* w, ptrdiff_t m);
long pipg_solution_iterations(const pipg_solution* solution);
long pipg_solution_projections(const pipg_solution* solution);
/* 1 when the feasibility tolerance fired, 0 on max-iteration exhaustion. */
int pipg_solution_reached_tolerance(const pipg_solution* solution);
long pipg_solution_trace_len(const pipg_solution* solution);
/* CSV columns k,solver,[dist_sq,]feas_sq,[dist_sq_avg,]feas_sq_avg,projections;
 * path "-" writes to stdout. */
pipg_status pipg_solution_trace_csv_file(const pipg_solution* solution, const char* path);
void pipg_solution_free(pipg_solution* solution);

/* -------- reference oracle -------- */

/* Certified optimum: a long varying-step run cross-checked by an ADMM
 * fixed-point polish; fails with PIPG_ERR_CERTIFICATION if the two solver
 * families disagree or the residual target is not met. Pass 0 for the
 * defaults (1e6 iterations, 1e-10 residual target). */
pipg_status pipg_compute_reference(const pipg_problem* problem, long max_iterations,
                                   double target_residual, pipg_reference** out);
pipg_status pipg_reference_to_json_file(const pipg_reference* ref, const char* path);
pipg_status pipg_reference_from_json_file(const char* path, pipg_reference** out);
pipg_status pipg_reference_residuals(const pipg_reference* ref, double residuals[3]);
ptrdiff_t pipg_reference_num_vars(const pipg_reference* ref);
pipg_status pipg_reference_primal(const pipg_reference* ref, double* z, ptrdiff_t n);
void pipg_reference_free(pipg_reference* ref);

/* -------- benchmark harness -------- */

/* Convergence-over-iterations trace from a zero initialization, written as
 * CSV (path "-" for stdout). reference may be NULL (distance columns are then
 * omitted, with a warning). */
pipg_status pipg_trace_csv_file(const pipg_problem* problem, const char* solver,
                                long max_iterations, const pipg_reference* reference,
                                const char* path);

/* Runs a sweep described by a JSON config file and writes the aggregated CSV
 * to the config's "output" path, or to output_override when non-NULL, plus a
 * run-metadata sidecar <output>.meta.json echoing the resolved config. Cells
 * run concurrently on a pool sized by PIPG_BENCH_THREADS. Byte-identical
 * output for identical configs. */
pipg_status pipg_sweep_run_file(const char* config_path, const char* output_override);

/* Writes the stage-wise (unlifted) benchmark description as JSON. */
pipg_status pipg_benchmark_tracking_to_json_file(int horizon, const char* path);

#ifdef __cplusplus
}
#endif

#endif /* PIPG_H */
