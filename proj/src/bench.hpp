#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "baselines.hpp"
#include "json_io.hpp"
#include "mpc.hpp"
#include "pipg.hpp"
#include "problem.hpp"

namespace pipg::bench {

/// Solver identifiers accepted by the harness and the benchmark config.
enum class SolverId { PipgConst, PipgVar, Dfg, Admm, CpConst, CpAccel };

const char* to_string(SolverId id);
SolverId solver_id_from_string(const std::string& s);
const std::vector<SolverId>& all_solvers();

/// Per-run knobs shared by every solver; fields that a method does not use
/// are ignored. bounds is computed once per problem when not supplied.
struct SolverSettings {
  long max_iterations = 100000;
  std::optional<double> feas_tol_inf;
  IterateKind stop_on = IterateKind::Raw;
  double admm_alpha = 2.0;
  double dfg_inner_tol = 1e-3;
  double pipg_beta = 0.0;  // <= 0 selects the default sqrt(lambda/sigma)
  double bounds_tolerance = 1e-3;
  std::optional<SpectralBounds> bounds;
};

/// Runs one solver on one problem. All solvers share the projection-counting
/// convention (one per iteration except the dual fast gradient method, which
/// counts every inner-loop projection).
std::pair<Solution, ConvergenceTrace> run_solver(const QpProblem& problem, SolverId id,
                                                 const SolverSettings& settings,
                                                 const InitialIterates& init,
                                                 const TraceOptions& trace = {});

/// A certified optimum: the varying-step PI projected gradient solution
/// cross-checked by an independently-iterated ADMM fixed-point polish.
struct ReferenceSolution {
  Vector z_star;
  Vector w_star;
  KktResidual certified_residuals;
  std::vector<std::string> producing_solvers;
};

struct ReferenceOptions {
  long max_iterations = 1000000;
  double target_residual = 1e-10;
  double admm_alpha = 2.0;
  long polish_iterations = 2000;
  double agreement_tol = 1e-7;  // relative disagreement that fails certification
};

/// Computes a certified reference optimum. The varying-step solver is run
/// until all KKT residuals fall below target_residual; ADMM is then started
/// at that candidate (with its consensus dual constructed from the
/// candidate's own optimality map) and iterated polish_iterations times. The
/// candidate certifies only if ADMM's residuals also meet the target and the
/// two primal solutions agree to agreement_tol in relative 2-norm; otherwise
/// a CertificationError is thrown carrying both candidates' data.
ReferenceSolution compute_reference(const QpProblem& problem,
                                    const ReferenceOptions& options = {});

Json reference_to_json(const ReferenceSolution& ref);
ReferenceSolution reference_from_json(const Json& j);

/// Convergence-over-iterations mode: runs max_k iterations with per-iteration
/// recording. Distance columns require a reference; without one they are
/// omitted from the CSV (with a warning on stderr).
ConvergenceTrace run_trace(const QpProblem& problem, SolverId id, const SolverSettings& settings,
                           const InitialIterates& init, long max_k,
                           const ReferenceSolution* reference);

/// CSV columns: k,solver,dist_sq,feas_sq,dist_sq_avg,feas_sq_avg,projections
/// (distance columns only when with_reference).
void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace, const std::string& solver,
                     bool with_reference);

/// Sweep experiment description (projection-count-to-tolerance mode).
struct ExperimentConfig {
  std::vector<int> horizons = {5, 15, 25};
  std::vector<SolverId> solvers = all_solvers();
  bool solvers_explicit = false;  // explicit lists run everywhere, defaults
                                  // omit the slow constant-step pair below 1e-3
  std::vector<double> tolerances = {1e-3};
  int num_seeds = 20;
  long seed_base = 0;
  bool init_standard_normal = true;  // false: zeros
  long max_iterations = 1000000;
  std::optional<Json> max_iterations_per_solver;  // {"pipg-const": n, ...}
  double admm_alpha = 2.0;
  double dfg_inner_tol = 1e-3;
  double pipg_beta = 0.0;  // <= 0 selects the default sqrt(lambda/sigma)
  std::string output = "sweep.csv";

  void validate() const;
  long max_iterations_for(SolverId id) const;
};

ExperimentConfig config_from_json(const Json& j);

/// Resolved-config echo used for the run-metadata sidecar.
Json config_to_json(const ExperimentConfig& config);

/// One aggregated sweep row: statistics over the seeds of a (T, solver, eps)
/// cell. Runs that exhaust max_iterations are excluded from the mean/std and
/// counted in failures.
struct SweepRow {
  int horizon = 0;
  SolverId solver = SolverId::PipgVar;
  double epsilon = 0.0;
  double mean_projections = 0.0;
  double std_projections = 0.0;
  int failures = 0;
};

struct SweepReport {
  std::vector<SweepRow> rows;
};

/// Runs the sweep on a work pool (size from the PIPG_BENCH_THREADS
/// environment variable, default: hardware concurrency). Experiment e =
/// (T, eps, seed) draws its initialization from generator seed
/// seed_base + index(e); every solver replays the same initialization, so the
/// per-cell statistics are paired across solvers. Output is deterministic for
/// a fixed config regardless of the pool size.
SweepReport run_sweep(const ExperimentConfig& config);

/// CSV columns: T,solver,epsilon,mean_projections,std_projections,failures.
void write_sweep_csv(std::ostream& out, const SweepReport& report);

/// Shortest-round-trip decimal formatting used for all CSV numbers, so equal
/// doubles always print as identical bytes.
std::string format_double(double v);

}  // namespace pipg::bench
