// Benchmark harness CLI. Talks to the solver library exclusively through the
// C API in pipg.h.

#include <cstdio>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "pipg.h"

namespace {

int fail(pipg_status status, const char* what) {
  std::fprintf(stderr, "bench %s: %s: %s\n", what, pipg_status_string(status),
               pipg_last_error());
  return 1;
}

struct ProblemHandle {
  pipg_problem* p = nullptr;
  ~ProblemHandle() { pipg_problem_free(p); }
};

struct ReferenceHandle {
  pipg_reference* r = nullptr;
  ~ReferenceHandle() { pipg_reference_free(r); }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Trajectory-planning QP benchmark harness"};
  app.require_subcommand(1);

  // bench build --T <int> --out <path.json>
  int build_T = 25;
  std::string build_out;
  std::string build_tracking_out;
  auto* cmd_build = app.add_subcommand("build", "Emit the lifted benchmark QP as JSON");
  cmd_build->add_option("--T", build_T, "horizon")->required();
  cmd_build->add_option("--out", build_out, "output problem JSON path")->required();
  cmd_build->add_option("--tracking-out", build_tracking_out,
                        "also emit the stage-wise tracking description");

  // bench reference --T <int> --out <path.json> [--max-iter N] [--tol r]
  int ref_T = 25;
  std::string ref_out;
  long ref_max_iter = 0;
  double ref_tol = 0.0;
  auto* cmd_ref = app.add_subcommand("reference", "Compute a certified reference solution");
  cmd_ref->add_option("--T", ref_T, "horizon")->required();
  cmd_ref->add_option("--out", ref_out, "output reference JSON path")->required();
  cmd_ref->add_option("--max-iter", ref_max_iter, "iteration cap (default 1e6)");
  cmd_ref->add_option("--tol", ref_tol, "KKT residual target (default 1e-10)");

  // bench trace --T <int> --solver <id> --max-iter <int> [--ref <path>] [--out <path>]
  int trace_T = 25;
  std::string trace_solver;
  long trace_max_iter = 10000;
  std::string trace_ref;
  std::string trace_out = "-";
  auto* cmd_trace = app.add_subcommand("trace", "Per-iteration convergence trace as CSV");
  cmd_trace->add_option("--T", trace_T, "horizon")->required();
  cmd_trace->add_option("--solver", trace_solver,
                        "pipg-var|pipg-const|dfg|admm|cp-const|cp-accel")->required();
  cmd_trace->add_option("--max-iter", trace_max_iter, "iterations to run")->required();
  cmd_trace->add_option("--ref", trace_ref, "reference JSON for distance columns");
  cmd_trace->add_option("--out", trace_out, "output CSV path (default stdout)");

  // bench sweep --config <path.json> [--out <path>]
  std::string sweep_config;
  std::string sweep_out;
  auto* cmd_sweep = app.add_subcommand("sweep", "Projection-count sweep from a JSON config");
  cmd_sweep->add_option("--config", sweep_config, "experiment config JSON")->required();
  cmd_sweep->add_option("--out", sweep_out, "override the config's output CSV path");

  CLI11_PARSE(app, argc, argv);

  if (cmd_build->parsed()) {
    ProblemHandle problem;
    pipg_status st = pipg_benchmark_problem(build_T, &problem.p);
    if (st != PIPG_OK) return fail(st, "build");
    st = pipg_problem_to_json_file(problem.p, build_out.c_str());
    if (st != PIPG_OK) return fail(st, "build");
    if (!build_tracking_out.empty()) {
      st = pipg_benchmark_tracking_to_json_file(build_T, build_tracking_out.c_str());
      if (st != PIPG_OK) return fail(st, "build");
    }
    std::fprintf(stderr, "bench build: T=%d, n=%td, m=%td -> %s\n", build_T,
                 pipg_problem_num_vars(problem.p), pipg_problem_num_constraints(problem.p),
                 build_out.c_str());
    return 0;
  }

  if (cmd_ref->parsed()) {
    ProblemHandle problem;
    pipg_status st = pipg_benchmark_problem(ref_T, &problem.p);
    if (st != PIPG_OK) return fail(st, "reference");
    ReferenceHandle ref;
    st = pipg_compute_reference(problem.p, ref_max_iter, ref_tol, &ref.r);
    if (st != PIPG_OK) return fail(st, "reference");
    st = pipg_reference_to_json_file(ref.r, ref_out.c_str());
    if (st != PIPG_OK) return fail(st, "reference");
    double res[3] = {0, 0, 0};
    pipg_reference_residuals(ref.r, res);
    std::fprintf(stderr,
                 "bench reference: T=%d certified (primal_eq=%.3e, primal_set=%.3e, "
                 "stationarity=%.3e) -> %s\n",
                 ref_T, res[0], res[1], res[2], ref_out.c_str());
    return 0;
  }

  if (cmd_trace->parsed()) {
    ProblemHandle problem;
    pipg_status st = pipg_benchmark_problem(trace_T, &problem.p);
    if (st != PIPG_OK) return fail(st, "trace");
    ReferenceHandle ref;
    if (!trace_ref.empty()) {
      st = pipg_reference_from_json_file(trace_ref.c_str(), &ref.r);
      if (st != PIPG_OK) return fail(st, "trace");
    }
    st = pipg_trace_csv_file(problem.p, trace_solver.c_str(), trace_max_iter, ref.r,
                             trace_out.c_str());
    if (st != PIPG_OK) return fail(st, "trace");
    return 0;
  }

  if (cmd_sweep->parsed()) {
    pipg_status st = pipg_sweep_run_file(sweep_config.c_str(),
                                         sweep_out.empty() ? nullptr : sweep_out.c_str());
    if (st != PIPG_OK) return fail(st, "sweep");
    return 0;
  }

  return 1;
}
