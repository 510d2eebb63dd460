#include <Eigen/Dense>

#include <sstream>

#include "bench.hpp"
#include "doctest.h"
#include "errors.hpp"
#include "rng.hpp"
#include "spectral.hpp"

using namespace pipg;
using namespace pipg::bench;

TEST_CASE("solver ids round trip and reject unknowns") {
  for (SolverId id : all_solvers()) CHECK(solver_id_from_string(to_string(id)) == id);
  CHECK_THROWS_AS(solver_id_from_string("sgd"), ConfigError);
}

TEST_CASE("xoshiro streams are reproducible") {
  Xoshiro256 a(123), b(123), c(124);
  bool all_equal = true;
  bool any_diff = false;
  for (int i = 0; i < 100; ++i) {
    const double x = a.normal();
    all_equal = all_equal && x == b.normal();
    any_diff = any_diff || x != c.normal();
  }
  CHECK(all_equal);
  CHECK(any_diff);
}

TEST_CASE("reference oracle matches the analytic optimum of an equality QP") {
  Matrix H(2, 2);
  H << 2, 0, 0, 3;
  Vector h(2);
  h << 1, -1;
  Matrix G(1, 2);
  G << 1, 1;
  Vector g(1);
  g << 2;
  QpProblem p(H, h, G, g, ConvexSet(Whole{2}));

  Matrix K = Matrix::Zero(3, 3);
  K.topLeftCorner(2, 2) = H;
  K.topRightCorner(2, 1) = G.transpose();
  K.bottomLeftCorner(1, 2) = G;
  Vector rhs(3);
  rhs << -h, g;
  Vector sol = K.partialPivLu().solve(rhs);

  ReferenceSolution ref = compute_reference(p);
  CHECK((ref.z_star - sol.head(2)).norm() <= 1e-9);
  CHECK((ref.w_star - sol.tail(1)).norm() <= 1e-7);
  CHECK(ref.certified_residuals.max() <= 1e-9);
  CHECK(ref.producing_solvers.size() == 2);
}

TEST_CASE("reference oracle certifies the benchmark and fails when starved") {
  QpProblem p = lift(build_benchmark(5));
  ReferenceSolution ref = compute_reference(p);
  CHECK(ref.certified_residuals.primal_eq <= 1e-9);
  CHECK(ref.certified_residuals.primal_set <= 1e-9);
  CHECK(ref.certified_residuals.stationarity <= 1e-9);

  // spec-grade residuals at the reference point
  KktResidual r = p.kkt_residual(ref.z_star, ref.w_star);
  CHECK(r.max() <= 1e-8);

  ReferenceOptions starved;
  starved.max_iterations = 10;
  CHECK_THROWS_AS(compute_reference(p, starved), CertificationError);
}

TEST_CASE("reference JSON round trip") {
  QpProblem p = lift(build_benchmark(2));
  ReferenceSolution ref = compute_reference(p);
  ReferenceSolution back = reference_from_json(reference_to_json(ref));
  CHECK((ref.z_star - back.z_star).norm() == 0.0);
  CHECK((ref.w_star - back.w_star).norm() == 0.0);
  CHECK(ref.certified_residuals.stationarity == back.certified_residuals.stationarity);
}

TEST_CASE("run_trace starts at k = 1 and records every iteration") {
  QpProblem p = lift(build_benchmark(3));
  SolverSettings settings;
  ConvergenceTrace trace = run_trace(p, SolverId::PipgVar, settings, {}, 50, nullptr);
  REQUIRE(trace.size() == 50);
  CHECK(trace.records().front().k == 1);
  CHECK(trace.records().back().k == 50);
  for (const auto& rec : trace.records()) CHECK(rec.k >= 1);
}

TEST_CASE("trace csv has the documented columns") {
  QpProblem p = lift(build_benchmark(2));
  ReferenceSolution ref = compute_reference(p);
  SolverSettings settings;
  ConvergenceTrace trace = run_trace(p, SolverId::PipgVar, settings, {}, 5, &ref);
  std::ostringstream out;
  write_trace_csv(out, trace, "pipg-var", true);
  const std::string text = out.str();
  CHECK(text.rfind("k,solver,dist_sq,feas_sq,dist_sq_avg,feas_sq_avg,projections\n", 0) == 0);
  CHECK(text.find("\n1,pipg-var,") != std::string::npos);
  CHECK(text.find("\n0,") == std::string::npos);

  std::ostringstream noref;
  write_trace_csv(noref, trace, "pipg-var", false);
  CHECK(noref.str().rfind("k,solver,feas_sq,feas_sq_avg,projections\n", 0) == 0);
}

TEST_CASE("experiment config parsing, defaults and validation") {
  auto j = parse_json_text(R"({
    "horizons": [2, 3],
    "solvers": ["pipg-var", "admm"],
    "tolerances": [1e-2],
    "num_seeds": 2,
    "seed_base": 7,
    "init_distribution": "zeros",
    "max_iterations": {"default": 5000, "admm": 800},
    "output": "out.csv"
  })",
                           "config");
  ExperimentConfig c = config_from_json(j);
  CHECK(c.horizons == std::vector<int>{2, 3});
  CHECK(c.solvers.size() == 2);
  CHECK(c.solvers_explicit);
  CHECK_FALSE(c.init_standard_normal);
  CHECK(c.max_iterations_for(SolverId::Admm) == 800);
  CHECK(c.max_iterations_for(SolverId::PipgVar) == 5000);

  CHECK_THROWS_AS(config_from_json(parse_json_text(R"({"tolerances": [0]})", "c")), ConfigError);
  CHECK_THROWS_AS(config_from_json(parse_json_text(R"({"solvers": ["nope"]})", "c")), ConfigError);
  CHECK_THROWS_AS(config_from_json(parse_json_text(R"({"init_distribution": "laplace"})", "c")),
                  ConfigError);
  CHECK_THROWS_AS(
      config_from_json(parse_json_text(R"({"max_iterations": {"sgd": 10}})", "c")), ConfigError);
  CHECK_THROWS_AS(
      config_from_json(parse_json_text(R"({"max_iterations": {"admm": 0}})", "c")), ConfigError);
}

TEST_CASE("defaulted solver lists omit the slow constant-step pair below 1e-3") {
  ExperimentConfig c;
  c.horizons = {2};
  c.tolerances = {1e-3, 1e-5};
  c.num_seeds = 1;
  c.init_standard_normal = false;
  c.max_iterations = 30000;
  SweepReport report = run_sweep(c);

  int fine_rows = 0;
  int coarse_rows = 0;
  for (const auto& row : report.rows) {
    if (row.epsilon == 1e-3) ++coarse_rows;
    if (row.epsilon == 1e-5) {
      ++fine_rows;
      CHECK(row.solver != SolverId::PipgConst);
      CHECK(row.solver != SolverId::CpConst);
    }
  }
  CHECK(coarse_rows == 6);
  CHECK(fine_rows == 4);

  // explicitly listed solvers run at every tolerance
  ExperimentConfig e = c;
  e.solvers = {SolverId::PipgConst};
  e.solvers_explicit = true;
  SweepReport forced = run_sweep(e);
  CHECK(forced.rows.size() == 2);
}

TEST_CASE("sweeps are deterministic byte for byte") {
  ExperimentConfig c;
  c.horizons = {2, 3};
  c.solvers = {SolverId::PipgVar, SolverId::CpAccel};
  c.solvers_explicit = true;
  c.tolerances = {1e-2, 1e-4};
  c.num_seeds = 3;
  c.seed_base = 11;
  c.max_iterations = 50000;

  auto render = [&] {
    std::ostringstream out;
    write_sweep_csv(out, run_sweep(c));
    return out.str();
  };
  const std::string first = render();
  const std::string second = render();
  CHECK(first == second);
  CHECK(first.rfind("T,solver,epsilon,mean_projections,std_projections,failures\n", 0) == 0);

  // zero-init single seed, twice
  ExperimentConfig z = c;
  z.init_standard_normal = false;
  z.num_seeds = 1;
  std::ostringstream z1, z2;
  write_sweep_csv(z1, run_sweep(z));
  write_sweep_csv(z2, run_sweep(z));
  CHECK(z1.str() == z2.str());
}

TEST_CASE("sweep records failures instead of aborting") {
  ExperimentConfig c;
  c.horizons = {3};
  c.solvers = {SolverId::PipgConst};
  c.solvers_explicit = true;
  c.tolerances = {1e-9};  // unreachable in 50 iterations
  c.num_seeds = 2;
  c.max_iterations = 50;
  SweepReport report = run_sweep(c);
  REQUIRE(report.rows.size() == 1);
  CHECK(report.rows[0].failures == 2);
  CHECK(std::isnan(report.rows[0].mean_projections));
}

TEST_CASE("sweep statistics are paired across solvers") {
  // with identical seeds, two copies of the same solver id give equal stats
  ExperimentConfig c;
  c.horizons = {2};
  c.solvers = {SolverId::PipgVar, SolverId::PipgVar};
  c.solvers_explicit = true;
  c.tolerances = {1e-3};
  c.num_seeds = 2;
  c.max_iterations = 50000;
  SweepReport report = run_sweep(c);
  REQUIRE(report.rows.size() == 2);
  CHECK(report.rows[0].mean_projections == report.rows[1].mean_projections);
  CHECK(report.rows[0].std_projections == report.rows[1].std_projections);
}

TEST_CASE("format_double round trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, 1e-17, 123456.789, 0.0}) {
    const std::string s = format_double(v);
    CHECK(std::stod(s) == v);
  }
}
