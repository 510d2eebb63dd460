#include "pipg.h"

#include <cstring>
#include <fstream>
#include <iostream>
#include <memory>
#include <string>

#include "bench.hpp"
#include "errors.hpp"
#include "json_io.hpp"
#include "problem.hpp"

using pipg::bench::SolverSettings;

struct pipg_problem {
  pipg::QpProblem impl;
};

struct pipg_solution {
  pipg::Solution sol;
  pipg::ConvergenceTrace trace;
  std::string solver;
  bool with_reference = false;
};

struct pipg_reference {
  pipg::bench::ReferenceSolution impl;
};

namespace {

thread_local std::string g_last_error;

void set_error(const std::string& msg) { g_last_error = msg; }

template <typename Fn>
pipg_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const pipg::DimensionError& e) {
    set_error(e.what());
    return PIPG_ERR_DIMENSION;
  } catch (const pipg::UnsupportedProblemError& e) {
    set_error(e.what());
    return PIPG_ERR_UNSUPPORTED;
  } catch (const pipg::ConfigError& e) {
    set_error(e.what());
    return PIPG_ERR_CONFIG;
  } catch (const pipg::ParseError& e) {
    set_error(e.what());
    return PIPG_ERR_PARSE;
  } catch (const pipg::NumericalError& e) {
    set_error(e.what());
    return PIPG_ERR_NUMERICAL;
  } catch (const pipg::ConvergenceError& e) {
    set_error(e.what());
    return PIPG_ERR_NUMERICAL;
  } catch (const pipg::RootBracketError& e) {
    set_error(e.what());
    return PIPG_ERR_NUMERICAL;
  } catch (const pipg::FactorizationError& e) {
    set_error(e.what());
    return PIPG_ERR_FACTORIZATION;
  } catch (const pipg::CertificationError& e) {
    set_error(e.what());
    return PIPG_ERR_CERTIFICATION;
  } catch (const std::exception& e) {
    set_error(e.what());
    return PIPG_ERR_INTERNAL;
  } catch (...) {
    set_error("unknown error");
    return PIPG_ERR_INTERNAL;
  }
}

pipg_status copy_out(const pipg::Vector& v, double* buf, ptrdiff_t len, const char* what) {
  if (!buf) {
    set_error(std::string(what) + ": null output buffer");
    return PIPG_ERR_ARGUMENT;
  }
  if (len != v.size()) {
    set_error(std::string(what) + ": buffer length does not match");
    return PIPG_ERR_DIMENSION;
  }
  std::memcpy(buf, v.data(), sizeof(double) * static_cast<std::size_t>(v.size()));
  return PIPG_OK;
}

}  // namespace

extern "C" {

const char* pipg_version(void) { return "0.1.0"; }

const char* pipg_status_string(pipg_status status) {
  switch (status) {
    case PIPG_OK: return "ok";
    case PIPG_ERR_ARGUMENT: return "invalid argument";
    case PIPG_ERR_DIMENSION: return "dimension mismatch";
    case PIPG_ERR_CONFIG: return "invalid configuration";
    case PIPG_ERR_UNSUPPORTED: return "unsupported problem class";
    case PIPG_ERR_PARSE: return "parse error";
    case PIPG_ERR_NUMERICAL: return "numerical failure";
    case PIPG_ERR_FACTORIZATION: return "factorization failure";
    case PIPG_ERR_CERTIFICATION: return "certification failure";
    case PIPG_ERR_IO: return "i/o failure";
    case PIPG_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* pipg_last_error(void) { return g_last_error.c_str(); }

pipg_status pipg_problem_from_json(const char* text, pipg_problem** out) {
  if (!text || !out) {
    set_error("pipg_problem_from_json: null argument");
    return PIPG_ERR_ARGUMENT;
  }
  return guarded([&] {
    auto j = pipg::parse_json_text(text, "problem");
    *out = new pipg_problem{pipg::problem_from_json(j)};
    return PIPG_OK;
  });
}

pipg_status pipg_problem_from_json_file(const char* path, pipg_problem** out) {
  if (!path || !out) {
    set_error("pipg_problem_from_json_file: null argument");
    return PIPG_ERR_ARGUMENT;
  }
  return guarded([&] {
    *out = new pipg_problem{pipg::problem_from_json(pipg::load_json_file(path))};
    return PIPG_OK;
  });
}

pipg_status pipg_problem_to_json_file(const pipg_problem* problem, const char* path) {
  if (!problem || !path) {
    set_error("pipg_problem_to_json_file: null argument");
    return PIPG_ERR_ARGUMENT;
  }
  return guarded([&] {
    pipg::save_json_file(pipg::problem_to_json(problem->impl), path);
    return PIPG_OK;
  });
}

pipg_status pipg_benchmark_problem(int horizon, pipg_problem** out) {
  if (!out) {
    set_error("pipg_benchmark_problem: null output");
    return PIPG_ERR_ARGUMENT;
  }
  return guarded([&] {
    *out = new pipg_problem{pipg::lift(pipg::build_benchmark(horizon))};
    return PIPG_OK;
  });
}

void pipg_problem_free(pipg_problem* problem) { delete problem; }

ptrdiff_t pipg_problem_num_vars(const pipg_problem* problem) {
  return problem ? problem->impl.n() : -1;
}

ptrdiff_t pipg_problem_num_constraints(const pipg_problem* problem) {
  return problem ? problem->impl.m() : -1;
}

pipg_status pipg_problem_objective(const pipg_problem* problem, const double* z, ptrdiff_t n,
                                   double* value) {
  if (!problem || !z || !value) {
    set_error("pipg_problem_objective: null argument");
    return PIPG_ERR_ARGUMENT;
  }
  return guarded([&] {
    if (n != problem->impl.n()) throw pipg::DimensionError("objective: dim(z) != n");
    *value = problem->impl.objective(Eigen::Map<const pipg::Vector>(z, n));
    return PIPG_OK;
  });
}

pipg_status pipg_problem_kkt_residual(const pipg_problem* problem, const double* z, ptrdiff_t n,
                                      const double* w, ptrdiff_t m, double residuals[3]) {
  if (!problem || !z || !w || !residuals) {
    set_error("pipg_problem_kkt_residual: null argument");
    return PIPG_ERR_ARGUMENT;
  }
  return guarded([&] {
    if (n != problem->impl.n() || m != problem->impl.m())
      throw pipg::DimensionError("kkt_residual: dimension mismatch");
    auto r = problem->impl.kkt_residual(Eigen::Map<const pipg::Vector>(z, n),
                                        Eigen::Map<const pipg::Vector>(w, m));
    residuals[0] = r.primal_eq;
    residuals[1] = r.primal_set;
    residuals[2] = r.stationarity;
    return PIPG_OK;
  });
}

void pipg_solve_options_init(pipg_solve_options* options) {
  if (!options) return;
  options->solver = "pipg-var";
  options->max_iterations = 100000;
  options->feas_tol_inf = 0.0;
  options->stop_on = 0;
  options->admm_alpha = 2.0;
  options->dfg_inner_tol = 1e-3;
  options->pipg_beta = 0.0;
  options->record_trace = 0;
  options->trace_stride = 1;
}

pipg_status pipg_solve(const pipg_problem* problem, const pipg_solve_options* options,
                       const double* z0, const double* w0, const pipg_reference* reference,
                       pipg_solution** out) {
  if (!problem || !options || !options->solver || !out) {
    set_error("pipg_solve: null argument");
    return PIPG_ERR_ARGUMENT;
  }
  return guarded([&] {
    const auto id = pipg::bench::solver_id_from_string(options->solver);
    SolverSettings settings;
    settings.max_iterations = options->max_iterations;
    if (options->feas_tol_inf > 0.0) settings.feas_tol_inf = options->feas_tol_inf;
    switch (options->stop_on) {
      case 0: settings.stop_on = pipg::IterateKind::Raw; break;
      case 1: settings.stop_on = pipg::IterateKind::AvgHat; break;
      case 2: settings.stop_on = pipg::IterateKind::AvgTilde; break;
      default: throw pipg::ConfigError("stop_on must be 0, 1 or 2");
    }
    settings.admm_alpha = options->admm_alpha;
    settings.dfg_inner_tol = options->dfg_inner_tol;
    settings.pipg_beta = options->pipg_beta;

    pipg::InitialIterates init;
    if (z0) init.z = Eigen::Map<const pipg::Vector>(z0, problem->impl.n());
    if (w0) init.w = Eigen::Map<const pipg::Vector>(w0, problem->impl.m());

    pipg::TraceOptions topts;
    topts.enabled = options->record_trace != 0;
    topts.stride = options->trace_stride > 0 ? options->trace_stride : 1;
    if (reference) topts.reference = reference->impl.z_star;

    auto [sol, trace] = pipg::bench::run_solver(problem->impl, id, settings, init, topts);
    auto* handle = new pipg_solution;
    handle->sol = std::move(sol);
    handle->trace = std::move(trace);
    handle->solver = options->solver;
    handle->with_reference = reference != nullptr;
    *out = handle;
    return PIPG_OK;
  });
}

ptrdiff_t pipg_solution_num_vars(const pipg_solution* solution) {
  return solution ? solution->sol.z.size() : -1;
}

ptrdiff_t pipg_solution_num_constraints(const pipg_solution* solution) {
  return solution ? solution->sol.w.size() : -1;
}

pipg_status pipg_solution_primal(const pipg_solution* solution, double* z, ptrdiff_t n) {
  if (!solution) return PIPG_ERR_ARGUMENT;
  return copy_out(solution->sol.z, z, n, "pipg_solution_primal");
}

pipg_status pipg_solution_primal_average(const pipg_solution* solution, double* z, ptrdiff_t n) {
  if (!solution) return PIPG_ERR_ARGUMENT;
  return copy_out(solution->sol.z_hat, z, n, "pipg_solution_primal_average");
}

pipg_status pipg_solution_dual(const pipg_solution* solution, double* w, ptrdiff_t m) {
  if (!solution) return PIPG_ERR_ARGUMENT;
  return copy_out(solution->sol.w, w, m, "pipg_solution_dual");
}

long pipg_solution_iterations(const pipg_solution* solution) {
  return solution ? solution->sol.iterations : -1;
}

long pipg_solution_projections(const pipg_solution* solution) {
  return solution ? solution->sol.projections : -1;
}

int pipg_solution_reached_tolerance(const pipg_solution* solution) {
  return solution && solution->sol.stop_reason == pipg::StopReason::FeasibilityTolerance ? 1 : 0;
}

long pipg_solution_trace_len(const pipg_solution* solution) {
  return solution ? static_cast<long>(solution->trace.size()) : -1;
}

pipg_status pipg_solution_trace_csv_file(const pipg_solution* solution, const char* path) {
  if (!solution || !path) {
    set_error("pipg_solution_trace_csv_file: null argument");
    return PIPG_ERR_ARGUMENT;
  }
  return guarded([&] {
    if (std::strcmp(path, "-") == 0) {
      pipg::bench::write_trace_csv(std::cout, solution->trace, solution->solver,
                                   solution->with_reference);
      return PIPG_OK;
    }
    std::ofstream out(path);
    if (!out) {
      set_error(std::string("cannot write ") + path);
      return PIPG_ERR_IO;
    }
    pipg::bench::write_trace_csv(out, solution->trace, solution->solver,
                                 solution->with_reference);
    return PIPG_OK;
  });
}

void pipg_solution_free(pipg_solution* solution) { delete solution; }

pipg_status pipg_compute_reference(const pipg_problem* problem, long max_iterations,
                                   double target_residual, pipg_reference** out) {
  if (!problem || !out) {
    set_error("pipg_compute_reference: null argument");
    return PIPG_ERR_ARGUMENT;
  }
  return guarded([&] {
    pipg::bench::ReferenceOptions opts;
    if (max_iterations > 0) opts.max_iterations = max_iterations;
    if (target_residual > 0.0) opts.target_residual = target_residual;
    *out = new pipg_reference{pipg::bench::compute_reference(problem->impl, opts)};
    return PIPG_OK;
  });
}

pipg_status pipg_reference_to_json_file(const pipg_reference* ref, const char* path) {
  if (!ref || !path) {
    set_error("pipg_reference_to_json_file: null argument");
    return PIPG_ERR_ARGUMENT;
  }
  return guarded([&] {
    pipg::save_json_file(pipg::bench::reference_to_json(ref->impl), path);
    return PIPG_OK;
  });
}

pipg_status pipg_reference_from_json_file(const char* path, pipg_reference** out) {
  if (!path || !out) {
    set_error("pipg_reference_from_json_file: null argument");
    return PIPG_ERR_ARGUMENT;
  }
  return guarded([&] {
    *out = new pipg_reference{pipg::bench::reference_from_json(pipg::load_json_file(path))};
    return PIPG_OK;
  });
}

pipg_status pipg_reference_residuals(const pipg_reference* ref, double residuals[3]) {
  if (!ref || !residuals) {
    set_error("pipg_reference_residuals: null argument");
    return PIPG_ERR_ARGUMENT;
  }
  residuals[0] = ref->impl.certified_residuals.primal_eq;
  residuals[1] = ref->impl.certified_residuals.primal_set;
  residuals[2] = ref->impl.certified_residuals.stationarity;
  return PIPG_OK;
}

ptrdiff_t pipg_reference_num_vars(const pipg_reference* ref) {
  return ref ? ref->impl.z_star.size() : -1;
}

pipg_status pipg_reference_primal(const pipg_reference* ref, double* z, ptrdiff_t n) {
  if (!ref) return PIPG_ERR_ARGUMENT;
  return copy_out(ref->impl.z_star, z, n, "pipg_reference_primal");
}

void pipg_reference_free(pipg_reference* ref) { delete ref; }

pipg_status pipg_trace_csv_file(const pipg_problem* problem, const char* solver,
                                long max_iterations, const pipg_reference* reference,
                                const char* path) {
  if (!problem || !solver || !path) {
    set_error("pipg_trace_csv_file: null argument");
    return PIPG_ERR_ARGUMENT;
  }
  return guarded([&] {
    const auto id = pipg::bench::solver_id_from_string(solver);
    SolverSettings settings;
    auto trace = pipg::bench::run_trace(problem->impl, id, settings, {}, max_iterations,
                                        reference ? &reference->impl : nullptr);
    if (std::strcmp(path, "-") == 0) {
      pipg::bench::write_trace_csv(std::cout, trace, solver, reference != nullptr);
      return PIPG_OK;
    }
    std::ofstream out(path);
    if (!out) {
      set_error(std::string("cannot write ") + path);
      return PIPG_ERR_IO;
    }
    pipg::bench::write_trace_csv(out, trace, solver, reference != nullptr);
    return PIPG_OK;
  });
}

pipg_status pipg_sweep_run_file(const char* config_path, const char* output_override) {
  if (!config_path) {
    set_error("pipg_sweep_run_file: null config path");
    return PIPG_ERR_ARGUMENT;
  }
  return guarded([&] {
    auto config = pipg::bench::config_from_json(pipg::load_json_file(config_path));
    if (output_override) config.output = output_override;
    auto report = pipg::bench::run_sweep(config);
    std::ofstream out(config.output, std::ios::binary);
    if (!out) {
      set_error("cannot write " + config.output);
      return PIPG_ERR_IO;
    }
    pipg::bench::write_sweep_csv(out, report);
    pipg::Json meta{{"version", pipg_version()},
                    {"config", pipg::bench::config_to_json(config)}};
    pipg::save_json_file(meta, config.output + ".meta.json");
    return PIPG_OK;
  });
}

pipg_status pipg_benchmark_tracking_to_json_file(int horizon, const char* path) {
  if (!path) {
    set_error("pipg_benchmark_tracking_to_json_file: null path");
    return PIPG_ERR_ARGUMENT;
  }
  return guarded([&] {
    pipg::save_json_file(pipg::tracking_to_json(pipg::build_benchmark(horizon)), path);
    return PIPG_OK;
  });
}

}  // extern "C"
