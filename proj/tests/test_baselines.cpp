#include <Eigen/Dense>

#include <cmath>

#include "baselines.hpp"
#include "bench.hpp"
#include "doctest.h"
#include "errors.hpp"
#include "mpc.hpp"
#include "spectral.hpp"

using namespace pipg;

namespace {

QpProblem least_norm_toy() {
  Matrix H = Matrix::Identity(2, 2);
  Vector h = Vector::Zero(2);
  Matrix G(1, 2);
  G << 1, 1;
  Vector g(1);
  g << 1;
  return QpProblem(H, h, G, g, ConvexSet(Whole{2}));
}

QpProblem equality_toy(Vector* z_star, Vector* w_star) {
  Matrix H(2, 2);
  H << 2, 0, 0, 3;
  Vector h(2);
  h << 1, -1;
  Matrix G(1, 2);
  G << 1, 1;
  Vector g(1);
  g << 2;
  Matrix K = Matrix::Zero(3, 3);
  K.topLeftCorner(2, 2) = H;
  K.topRightCorner(2, 1) = G.transpose();
  K.bottomLeftCorner(1, 2) = G;
  Vector rhs(3);
  rhs << -h, g;
  Vector sol = K.partialPivLu().solve(rhs);
  if (z_star) *z_star = sol.head(2);
  if (w_star) *w_star = sol.tail(1);
  return QpProblem(H, h, G, g, ConvexSet(Whole{2}));
}

StoppingRule run_for(long iters) {
  StoppingRule s;
  s.max_iterations = iters;
  return s;
}

}  // namespace

TEST_CASE("dual fast gradient solves the least-norm toy") {
  QpProblem p = least_norm_toy();
  SpectralBounds b{1.0, 1.0, 2.0};
  auto [sol, trace] = dual_fast_gradient_solve(p, b, {}, run_for(3000), 1e-4);
  CHECK(sol.z[0] == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(sol.z[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("dual fast gradient preconditions") {
  QpProblem p = least_norm_toy();
  CHECK_THROWS_AS(dual_fast_gradient_solve(p, SpectralBounds{0.0, 1.0, 2.0}, {}, run_for(10), 1e-3),
                  UnsupportedProblemError);
  CHECK_THROWS_AS(dual_fast_gradient_solve(p, SpectralBounds{1.0, 1.0, 2.0}, {}, run_for(10), 1.5),
                  ConfigError);
}

TEST_CASE("dual fast gradient: looser inner tolerance trades outer iterations for projections") {
  QpProblem p = lift(build_benchmark(5));
  SpectralBounds b = estimate_bounds(p, 1e-3);
  StoppingRule stop;
  stop.max_iterations = 100000;
  stop.feas_tol_inf = 1e-5;
  stop.stop_on = IterateKind::Raw;

  auto [loose, t1] = dual_fast_gradient_solve(p, b, {}, stop, 1e-3);
  auto [tight, t2] = dual_fast_gradient_solve(p, b, {}, stop, 1e-4);
  CHECK(loose.stop_reason == StopReason::FeasibilityTolerance);
  CHECK(tight.stop_reason == StopReason::FeasibilityTolerance);
  CHECK(loose.iterations >= tight.iterations);
  const double proj_per_outer_loose =
      static_cast<double>(loose.projections) / static_cast<double>(loose.iterations);
  const double proj_per_outer_tight =
      static_cast<double>(tight.projections) / static_cast<double>(tight.iterations);
  CHECK(proj_per_outer_loose < proj_per_outer_tight);
}

TEST_CASE("admm converges to the analytic optimum of an equality QP") {
  Vector zs, ws;
  QpProblem p = equality_toy(&zs, &ws);
  auto [sol, trace] = admm_solve(p, 2.0, {}, run_for(2000));
  CHECK((sol.z - zs).norm() <= 1e-8);
  CHECK((sol.w - ws).norm() <= 1e-8);
}

TEST_CASE("admm saddle solves stay accurate and are factorized once") {
  QpProblem p = lift(build_benchmark(5));
  AdmmSolver solver(p, 2.0);
  auto [sol1, t1] = solver.run({}, run_for(1000));
  CHECK(solver.diagnostics().factorizations == 1);
  CHECK(solver.diagnostics().max_linear_residual_inf <= 1e-10);

  // reuse: same factorization serves further runs
  InitialIterates warm;
  warm.z = sol1.z;
  warm.w = sol1.w;
  auto [sol2, t2] = solver.run(warm, run_for(500));
  CHECK(solver.diagnostics().factorizations == 1);
}

TEST_CASE("admm rejects rank-deficient G") {
  Matrix H = Matrix::Identity(2, 2);
  Matrix G(2, 2);
  G << 1, 1, 1, 1;  // rank 1
  Vector g(2);
  g << 1, 1;
  QpProblem p(H, Vector::Zero(2), G, g, ConvexSet(Whole{2}));
  CHECK_THROWS_AS(AdmmSolver(p, 2.0), FactorizationError);
}

TEST_CASE("admm alpha must be positive") {
  QpProblem p = least_norm_toy();
  CHECK_THROWS_AS(admm_solve(p, 0.0, {}, run_for(10)), ConfigError);
}

TEST_CASE("chambolle-pock constant solves the toy and validates steps") {
  Vector zs, ws;
  QpProblem p = equality_toy(&zs, &ws);
  SpectralBounds b{2.0, 3.0, 2.0};
  auto [sol, trace] = chambolle_pock_const_solve(p, b, 0.0, 0.0, {}, run_for(5000));
  CHECK((sol.z - zs).norm() <= 1e-6);

  // alpha (lambda + beta sigma) = 1 * (3 + 1 * 2) = 5 > 1
  CHECK_THROWS_AS(chambolle_pock_const_solve(p, b, 1.0, 1.0, {}, run_for(10)), ConfigError);
}

TEST_CASE("accelerated chambolle-pock solves the toy and needs mu > 0") {
  Vector zs, ws;
  QpProblem p = equality_toy(&zs, &ws);
  SpectralBounds b{2.0, 3.0, 2.0};
  auto [sol, trace] = chambolle_pock_accel_solve(p, b, {}, run_for(2000));
  CHECK((sol.z - zs).norm() <= 1e-6);

  CHECK_THROWS_AS(chambolle_pock_accel_solve(p, SpectralBounds{0.0, 3.0, 2.0}, {}, run_for(10)),
                  UnsupportedProblemError);
}

TEST_CASE("accelerated chambolle-pock single step matches hand arithmetic") {
  // H = I2, h = 0, G = [1 0], g = 1, Z = R^2, zero start.
  // mu = lambda = 1, sigma = 1, so beta^1 = 1, alpha^1 = 1/2.
  // Dual first: w^2 = 0 + 1 * (0 - 1) = -1.
  // Primal:     z^2 = 0 - (0.5/1.5) * (0 + 0 + G' w^2) = (1/3, 0).
  // A primal-first sweep with w^1 = 0 would leave z at 0, so this pins the
  // update order.
  Matrix H = Matrix::Identity(2, 2);
  Matrix G(1, 2);
  G << 1, 0;
  Vector g(1);
  g << 1;
  QpProblem p(H, Vector::Zero(2), G, g, ConvexSet(Whole{2}));
  SpectralBounds b{1.0, 1.0, 1.0};
  auto [sol, trace] = chambolle_pock_accel_solve(p, b, {}, run_for(1));
  CHECK(sol.w[0] == doctest::Approx(-1.0).epsilon(1e-15));
  CHECK(sol.z[0] == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(sol.z[1] == 0.0);
}

TEST_CASE("baselines agree with the certified reference on the benchmark") {
  QpProblem p = lift(build_benchmark(25));
  bench::ReferenceSolution ref = bench::compute_reference(p);
  SpectralBounds b = estimate_bounds(p, 1e-3);
  const double zn = ref.z_star.norm();

  SUBCASE("dual fast gradient") {
    StoppingRule stop = run_for(30000);
    stop.feas_tol_inf = 1e-7;
    stop.stop_on = IterateKind::Raw;
    auto [sol, trace] = dual_fast_gradient_solve(p, b, {}, stop, 1e-4);
    CHECK((sol.z - ref.z_star).norm() / zn <= 1e-4);
  }
  SUBCASE("admm") {
    // ADMM's tail is slow on this geometry; watch the distance through a
    // strided trace instead of waiting for a feasibility tolerance
    StoppingRule stop = run_for(2000000);
    TraceOptions topts;
    topts.enabled = true;
    topts.stride = 10000;
    topts.reference = ref.z_star;
    auto [sol, trace] = admm_solve(p, 2.0, {}, stop, topts);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& rec : trace.records()) best = std::min(best, std::sqrt(rec.dist_sq) / zn);
    CHECK(best <= 1e-4);
  }
  SUBCASE("accelerated chambolle-pock") {
    StoppingRule stop = run_for(60000);
    stop.feas_tol_inf = 1e-8;
    stop.stop_on = IterateKind::Raw;
    auto [sol, trace] = chambolle_pock_accel_solve(p, b, {}, stop);
    CHECK((sol.z - ref.z_star).norm() / zn <= 1e-4);
  }
}

TEST_CASE("cp-const and pipg-const need comparable projection counts") {
  QpProblem p = lift(build_benchmark(5));
  SpectralBounds b = estimate_bounds(p, 1e-3);
  StoppingRule stop;
  stop.max_iterations = 200000;
  stop.feas_tol_inf = 1e-3;
  stop.stop_on = IterateKind::Raw;

  auto [pipg_sol, t1] = solve(p, StepSchedule::constant(b), {}, stop);
  auto [cp_sol, t2] = chambolle_pock_const_solve(p, b, 0.0, 0.0, {}, stop);
  CHECK(pipg_sol.stop_reason == StopReason::FeasibilityTolerance);
  CHECK(cp_sol.stop_reason == StopReason::FeasibilityTolerance);
  const double ratio = static_cast<double>(pipg_sol.projections) /
                       static_cast<double>(cp_sol.projections);
  CHECK(ratio <= 2.0);
  CHECK(ratio >= 0.5);
}
