#include "bench.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <sstream>
#include <thread>

#include "errors.hpp"
#include "rng.hpp"
#include "spectral.hpp"
#include "thread_pool.hpp"

namespace pipg::bench {

const char* to_string(SolverId id) {
  switch (id) {
    case SolverId::PipgConst: return "pipg-const";
    case SolverId::PipgVar: return "pipg-var";
    case SolverId::Dfg: return "dfg";
    case SolverId::Admm: return "admm";
    case SolverId::CpConst: return "cp-const";
    case SolverId::CpAccel: return "cp-accel";
  }
  return "?";
}

SolverId solver_id_from_string(const std::string& s) {
  for (SolverId id : all_solvers())
    if (s == to_string(id)) return id;
  throw ConfigError("unknown solver id \"" + s + "\"");
}

const std::vector<SolverId>& all_solvers() {
  static const std::vector<SolverId> ids = {SolverId::PipgVar,  SolverId::PipgConst,
                                            SolverId::Dfg,      SolverId::Admm,
                                            SolverId::CpConst,  SolverId::CpAccel};
  return ids;
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::pair<Solution, ConvergenceTrace> run_solver(const QpProblem& problem, SolverId id,
                                                 const SolverSettings& settings,
                                                 const InitialIterates& init,
                                                 const TraceOptions& trace) {
  SpectralBounds bounds =
      settings.bounds ? *settings.bounds : estimate_bounds(problem, settings.bounds_tolerance);
  StoppingRule stop;
  stop.max_iterations = settings.max_iterations;
  stop.feas_tol_inf = settings.feas_tol_inf;
  stop.stop_on = settings.stop_on;

  switch (id) {
    case SolverId::PipgConst:
      return solve(problem, StepSchedule::constant(bounds, settings.pipg_beta), init, stop, trace);
    case SolverId::PipgVar:
      return solve(problem, StepSchedule::varying(bounds), init, stop, trace);
    case SolverId::Dfg:
      return dual_fast_gradient_solve(problem, bounds, init, stop, settings.dfg_inner_tol, trace);
    case SolverId::Admm:
      return admm_solve(problem, settings.admm_alpha, init, stop, trace);
    case SolverId::CpConst:
      return chambolle_pock_const_solve(problem, bounds, 0.0, 0.0, init, stop, trace);
    case SolverId::CpAccel:
      return chambolle_pock_accel_solve(problem, bounds, init, stop, trace);
  }
  throw ConfigError("unknown solver id");
}

ReferenceSolution compute_reference(const QpProblem& problem, const ReferenceOptions& options) {
  SpectralBounds bounds = estimate_bounds(problem, 1e-3);
  if (!(bounds.mu > 0.0))
    throw UnsupportedProblemError(
        "reference oracle needs a strongly convex objective (mu > 0)");
  StepSchedule schedule = StepSchedule::varying(bounds);

  // Stage 1: run the varying-step method until every KKT residual meets the
  // target, checking in chunks.
  SolverState state = SolverState::make(problem);
  detail::PipgWork work;
  work.resize(problem);
  constexpr long kCheckEvery = 500;
  bool hit = false;
  KktResidual res;
  for (long k = 1; k <= options.max_iterations; ++k) {
    detail::pipg_step_impl(problem, schedule, state, work);
    if (k % kCheckEvery == 0 || k == options.max_iterations) {
      res = problem.kkt_residual(state.z, state.w);
      if (res.max() <= options.target_residual) {
        hit = true;
        break;
      }
    }
  }
  if (!hit) {
    std::ostringstream msg;
    msg << "reference certification failed: KKT residual " << res.max() << " > "
        << options.target_residual << " after " << options.max_iterations << " iterations";
    throw CertificationError(msg.str());
  }

  // Stage 2: independent fixed-point check. ADMM iterates through a saddle
  // linear solve plus projection, an algebra disjoint from the projected
  // gradient step; started at the candidate it must stay there.
  AdmmSolver admm(problem, options.admm_alpha);
  Vector wc = options.admm_alpha * (problem.apply_H(state.z) + problem.h() +
                                    problem.apply_Gt(state.w));
  StoppingRule polish;
  polish.max_iterations = options.polish_iterations;
  auto [admm_sol, admm_trace] = admm.run_consensus(state.z, wc, polish);

  const KktResidual admm_res = problem.kkt_residual(admm_sol.z, admm_sol.w);
  const double denom = std::max(1e-30, state.z.norm());
  const double rel_disagreement = (admm_sol.z - state.z).norm() / denom;
  if (admm_res.max() > options.target_residual || rel_disagreement > options.agreement_tol) {
    std::ostringstream msg;
    msg << "reference certification failed: admm residual " << admm_res.max()
        << ", relative disagreement " << rel_disagreement << " (tol " << options.agreement_tol
        << ")";
    throw CertificationError(msg.str(),
                             std::vector<double>(state.z.data(), state.z.data() + state.z.size()),
                             std::vector<double>(admm_sol.z.data(),
                                                 admm_sol.z.data() + admm_sol.z.size()));
  }

  ReferenceSolution ref;
  ref.z_star = state.z;
  ref.w_star = state.w;  // dual taken from the PI projected gradient iterates
  ref.certified_residuals = res;
  ref.producing_solvers = {to_string(SolverId::PipgVar), to_string(SolverId::Admm)};
  return ref;
}

Json reference_to_json(const ReferenceSolution& ref) {
  return Json{{"z_star", vector_to_json(ref.z_star)},
              {"w_star", vector_to_json(ref.w_star)},
              {"residuals",
               Json{{"primal_eq", ref.certified_residuals.primal_eq},
                    {"primal_set", ref.certified_residuals.primal_set},
                    {"stationarity", ref.certified_residuals.stationarity}}},
              {"solvers", ref.producing_solvers}};
}

ReferenceSolution reference_from_json(const Json& j) {
  ReferenceSolution ref;
  try {
    ref.z_star = vector_from_json(j.at("z_star"), "z_star");
    ref.w_star = vector_from_json(j.at("w_star"), "w_star");
    const Json& r = j.at("residuals");
    ref.certified_residuals.primal_eq = r.at("primal_eq").get<double>();
    ref.certified_residuals.primal_set = r.at("primal_set").get<double>();
    ref.certified_residuals.stationarity = r.at("stationarity").get<double>();
    for (const auto& s : j.at("solvers")) ref.producing_solvers.push_back(s.get<std::string>());
  } catch (const Json::exception& e) {
    throw ParseError(std::string("reference document: ") + e.what());
  }
  return ref;
}

ConvergenceTrace run_trace(const QpProblem& problem, SolverId id, const SolverSettings& settings,
                           const InitialIterates& init, long max_k,
                           const ReferenceSolution* reference) {
  SolverSettings s = settings;
  s.max_iterations = max_k;
  s.feas_tol_inf.reset();
  TraceOptions topts;
  topts.enabled = true;
  topts.stride = 1;
  if (reference)
    topts.reference = reference->z_star;
  else
    std::cerr << "bench: warning: no reference solution, distance columns omitted\n";
  auto [sol, trace] = run_solver(problem, id, s, init, topts);
  (void)sol;
  return trace;
}

void write_trace_csv(std::ostream& out, const ConvergenceTrace& trace, const std::string& solver,
                     bool with_reference) {
  if (with_reference)
    out << "k,solver,dist_sq,feas_sq,dist_sq_avg,feas_sq_avg,projections\n";
  else
    out << "k,solver,feas_sq,feas_sq_avg,projections\n";
  for (const auto& r : trace.records()) {
    out << r.k << ',' << solver << ',';
    if (with_reference)
      out << format_double(r.dist_sq) << ',' << format_double(r.feas_sq) << ','
          << format_double(r.dist_sq_avg) << ',' << format_double(r.feas_sq_avg) << ','
          << r.projections << '\n';
    else
      out << format_double(r.feas_sq) << ',' << format_double(r.feas_sq_avg) << ','
          << r.projections << '\n';
  }
}

void ExperimentConfig::validate() const {
  if (horizons.empty() || solvers.empty() || tolerances.empty())
    throw ConfigError("experiment config: horizons, solvers and tolerances must be nonempty");
  for (int T : horizons)
    if (T < 1) throw ConfigError("experiment config: horizons must be positive");
  for (double eps : tolerances)
    if (!(eps > 0.0)) throw ConfigError("experiment config: tolerances must be positive");
  if (num_seeds < 1) throw ConfigError("experiment config: num_seeds must be positive");
  if (max_iterations < 1) throw ConfigError("experiment config: max_iterations must be positive");
}

long ExperimentConfig::max_iterations_for(SolverId id) const {
  if (max_iterations_per_solver) {
    const Json& m = *max_iterations_per_solver;
    if (m.contains(to_string(id))) return m.at(to_string(id)).get<long>();
    if (m.contains("default")) return m.at("default").get<long>();
  }
  return max_iterations;
}

ExperimentConfig config_from_json(const Json& j) {
  if (!j.is_object()) throw ParseError("experiment config: expected an object");
  ExperimentConfig c;
  try {
    if (j.contains("horizons")) c.horizons = j.at("horizons").get<std::vector<int>>();
    if (j.contains("solvers")) {
      c.solvers.clear();
      c.solvers_explicit = true;
      for (const auto& s : j.at("solvers"))
        c.solvers.push_back(solver_id_from_string(s.get<std::string>()));
    }
    if (j.contains("tolerances")) c.tolerances = j.at("tolerances").get<std::vector<double>>();
    if (j.contains("num_seeds")) c.num_seeds = j.at("num_seeds").get<int>();
    if (j.contains("seed_base")) c.seed_base = j.at("seed_base").get<long>();
    if (j.contains("init_distribution")) {
      const std::string d = j.at("init_distribution").get<std::string>();
      if (d == "standard-normal")
        c.init_standard_normal = true;
      else if (d == "zeros")
        c.init_standard_normal = false;
      else
        throw ConfigError("init_distribution must be \"standard-normal\" or \"zeros\"");
    }
    if (j.contains("max_iterations")) {
      if (j.at("max_iterations").is_object()) {
        for (const auto& [key, value] : j.at("max_iterations").items()) {
          if (key != "default") solver_id_from_string(key);
          if (!value.is_number_integer() || value.get<long>() < 1)
            throw ConfigError("max_iterations entries must be positive integers");
        }
        c.max_iterations_per_solver = j.at("max_iterations");
      } else {
        c.max_iterations = j.at("max_iterations").get<long>();
      }
    }
    if (j.contains("admm_alpha")) c.admm_alpha = j.at("admm_alpha").get<double>();
    if (j.contains("dfg_inner_tol")) c.dfg_inner_tol = j.at("dfg_inner_tol").get<double>();
    if (j.contains("pipg_beta")) c.pipg_beta = j.at("pipg_beta").get<double>();
    if (j.contains("output")) c.output = j.at("output").get<std::string>();
  } catch (const Json::exception& e) {
    throw ParseError(std::string("experiment config: ") + e.what());
  }
  c.validate();
  return c;
}

Json config_to_json(const ExperimentConfig& config) {
  Json solvers = Json::array();
  for (SolverId id : config.solvers) solvers.push_back(to_string(id));
  Json j{{"horizons", config.horizons},
         {"solvers", solvers},
         {"solvers_explicit", config.solvers_explicit},
         {"tolerances", config.tolerances},
         {"num_seeds", config.num_seeds},
         {"seed_base", config.seed_base},
         {"init_distribution", config.init_standard_normal ? "standard-normal" : "zeros"},
         {"admm_alpha", config.admm_alpha},
         {"dfg_inner_tol", config.dfg_inner_tol},
         {"pipg_beta", config.pipg_beta},
         {"output", config.output}};
  if (config.max_iterations_per_solver)
    j["max_iterations"] = *config.max_iterations_per_solver;
  else
    j["max_iterations"] = config.max_iterations;
  return j;
}

namespace {

int pool_size_from_env() {
  if (const char* env = std::getenv("PIPG_BENCH_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

struct SweepCell {
  int t_index;
  int tol_index;
  int seed_index;
  int solver_index;
  long experiment_index;  // shared by all solvers of one (T, eps, seed)
};

/// Slow constant-step methods are omitted from defaulted solver lists below
/// the coarse tolerance, matching the harness defaults; explicit lists always
/// run.
bool cell_included(const ExperimentConfig& c, SolverId id, double eps) {
  if (c.solvers_explicit) return true;
  if (eps < 1e-3 && (id == SolverId::PipgConst || id == SolverId::CpConst)) return false;
  return true;
}

}  // namespace

SweepReport run_sweep(const ExperimentConfig& config) {
  config.validate();

  // Problems and spectral bounds per horizon, computed once.
  std::vector<QpProblem> problems;
  std::vector<SpectralBounds> bounds;
  problems.reserve(config.horizons.size());
  for (int T : config.horizons) {
    problems.push_back(lift(build_benchmark(T)));
    bounds.push_back(estimate_bounds(problems.back(), 1e-3));
  }

  // Enumerate cells; the experiment index runs over (T, eps, seed) so every
  // solver sees the same initialization for a given experiment.
  std::vector<SweepCell> cells;
  long experiment = 0;
  for (int ti = 0; ti < static_cast<int>(config.horizons.size()); ++ti)
    for (int ei = 0; ei < static_cast<int>(config.tolerances.size()); ++ei)
      for (int si = 0; si < config.num_seeds; ++si) {
        for (int vi = 0; vi < static_cast<int>(config.solvers.size()); ++vi)
          if (cell_included(config, config.solvers[vi], config.tolerances[ei]))
            cells.push_back(SweepCell{ti, ei, si, vi, experiment});
        ++experiment;
      }

  std::vector<long> projections(cells.size(), -1);  // -1 marks failure

  ThreadPool pool(pool_size_from_env());
  pool.parallel_for(0, static_cast<Index>(cells.size()), [&](Index i) {
    const SweepCell& cell = cells[static_cast<std::size_t>(i)];
    const QpProblem& problem = problems[cell.t_index];
    const SolverId id = config.solvers[cell.solver_index];
    const double eps = config.tolerances[cell.tol_index];

    InitialIterates init;
    if (config.init_standard_normal) {
      Xoshiro256 rng(static_cast<std::uint64_t>(config.seed_base + cell.experiment_index));
      Vector z0(problem.n()), w0(problem.m());
      for (Index q = 0; q < z0.size(); ++q) z0[q] = rng.normal();
      for (Index q = 0; q < w0.size(); ++q) w0[q] = rng.normal();
      init.z = std::move(z0);
      init.w = std::move(w0);
    }

    SolverSettings settings;
    settings.max_iterations = config.max_iterations_for(id);
    settings.feas_tol_inf = eps;
    settings.stop_on = IterateKind::Raw;
    settings.admm_alpha = config.admm_alpha;
    settings.dfg_inner_tol = config.dfg_inner_tol;
    settings.pipg_beta = config.pipg_beta;
    settings.bounds = bounds[cell.t_index];

    auto [sol, trace] = run_solver(problem, id, settings, init);
    projections[static_cast<std::size_t>(i)] =
        sol.stop_reason == StopReason::FeasibilityTolerance ? sol.projections : -1;
  });

  // Aggregate in config order: horizon, then solver, then tolerance.
  SweepReport report;
  for (int ti = 0; ti < static_cast<int>(config.horizons.size()); ++ti)
    for (int vi = 0; vi < static_cast<int>(config.solvers.size()); ++vi)
      for (int ei = 0; ei < static_cast<int>(config.tolerances.size()); ++ei) {
        if (!cell_included(config, config.solvers[vi], config.tolerances[ei])) continue;
        std::vector<long> counts;
        int failures = 0;
        for (std::size_t c = 0; c < cells.size(); ++c) {
          const SweepCell& cell = cells[c];
          if (cell.t_index != ti || cell.solver_index != vi || cell.tol_index != ei) continue;
          if (projections[c] < 0)
            ++failures;
          else
            counts.push_back(projections[c]);
        }
        SweepRow row;
        row.horizon = config.horizons[ti];
        row.solver = config.solvers[vi];
        row.epsilon = config.tolerances[ei];
        row.failures = failures;
        if (!counts.empty()) {
          double mean = 0.0;
          for (long v : counts) mean += static_cast<double>(v);
          mean /= static_cast<double>(counts.size());
          double var = 0.0;
          for (long v : counts) {
            const double d = static_cast<double>(v) - mean;
            var += d * d;
          }
          var = counts.size() > 1 ? var / static_cast<double>(counts.size() - 1) : 0.0;
          row.mean_projections = mean;
          row.std_projections = std::sqrt(var);
        } else {
          row.mean_projections = std::numeric_limits<double>::quiet_NaN();
          row.std_projections = std::numeric_limits<double>::quiet_NaN();
        }
        report.rows.push_back(row);
      }
  return report;
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
  out << "T,solver,epsilon,mean_projections,std_projections,failures\n";
  for (const auto& r : report.rows)
    out << r.horizon << ',' << to_string(r.solver) << ',' << format_double(r.epsilon) << ','
        << format_double(r.mean_projections) << ',' << format_double(r.std_projections) << ','
        << r.failures << '\n';
}

}  // namespace pipg::bench
