#include "baselines.hpp"

#include <cmath>
#include <vector>

#include "errors.hpp"

namespace pipg {

namespace {

Solution finalize(const Vector& z, const Vector& w, const detail::UniformAverages& avg,
                  long iterations, long projections, StopReason reason) {
  Solution sol;
  sol.z = z;
  sol.z_hat = avg.hat;
  sol.z_tilde = avg.tilde;
  sol.w = w;
  sol.iterations = iterations;
  sol.projections = projections;
  sol.stop_reason = reason;
  return sol;
}

void check_finite(const Vector& z, const Vector& w, long k, const char* who) {
  if (!z.allFinite() || !w.allFinite())
    throw NumericalError(std::string("non-finite iterate in ") + who, k);
}

}  // namespace

std::pair<Solution, ConvergenceTrace> dual_fast_gradient_solve(
    const QpProblem& problem, const SpectralBounds& bounds, const InitialIterates& init,
    const StoppingRule& stop, double inner_tol, const TraceOptions& trace, double dual_step) {
  bounds.validate();
  if (!(bounds.mu > 0.0))
    throw UnsupportedProblemError("dual fast gradient requires mu > 0 (H positive definite)");
  if (!(inner_tol > 0.0 && inner_tol < 1.0))
    throw ConfigError("dual fast gradient: inner_tol must lie in (0, 1)");
  const double alpha = dual_step > 0.0 ? dual_step : bounds.mu / bounds.sigma;
  const double momentum = (std::sqrt(bounds.lambda) - std::sqrt(bounds.mu)) /
                          (std::sqrt(bounds.lambda) + std::sqrt(bounds.mu));
  const double inv_lambda = 1.0 / bounds.lambda;

  Vector z = init.z ? *init.z : Vector::Zero(problem.n());
  Vector w = init.w ? *init.w : Vector::Zero(problem.m());
  if (z.size() != problem.n() || w.size() != problem.m())
    throw DimensionError("dual fast gradient: initial iterate dimensions");
  Vector v = w;

  detail::UniformAverages avg;
  avg.init(problem.n());
  RunRecorder recorder(problem, trace);

  Vector zj(problem.n()), yj(problem.n()), znew(problem.n()), grad(problem.n()),
      gtv(problem.n()), gz(problem.m()), wn(problem.m()), scratch(problem.m());
  long projections = 0;
  long iterations = 0;
  StopReason reason = StopReason::MaxIterations;
  constexpr long kInnerCap = 1000000;

  for (long k = 1; k <= stop.max_iterations; ++k) {
    avg.add_hat(z);
    // Inner Nesterov loop for argmin_{z in Z} 0.5 z^T H z + h^T z + <v, G z>,
    // warm-started at the previous outer iterate.
    zj = z;
    yj = z;
    problem.apply_Gt(v, gtv);
    for (long j = 1; j <= kInnerCap; ++j) {
      problem.apply_H(yj, grad);
      grad += problem.h();
      grad += gtv;
      znew = yj - inv_lambda * grad;
      problem.feasible_set().project_in_place(znew);
      ++projections;
      const double num = (znew - zj).norm();
      const double den = zj.norm();
      yj = znew + momentum * (znew - zj);
      zj = znew;
      if (den < 1e-30 ? num <= inner_tol : num / den <= inner_tol) break;
    }
    z = zj;

    problem.apply_G(z, gz);
    gz -= problem.g();
    wn = v + alpha * gz;
    v = wn + (static_cast<double>(k) / static_cast<double>(k + 3)) * (wn - w);
    w = wn;
    avg.add_tilde(z);
    check_finite(z, w, k, "dual fast gradient");

    iterations = k;
    const bool fired = detail::feasibility_stop(problem, stop, gz, avg.hat, avg.tilde, scratch);
    recorder.record(k, fired || k == stop.max_iterations, z, gz, avg.hat, projections);
    if (fired) {
      reason = StopReason::FeasibilityTolerance;
      break;
    }
  }
  return {finalize(z, w, avg, iterations, projections, reason), recorder.take()};
}

AdmmSolver::AdmmSolver(const QpProblem& problem, double alpha)
    : problem_(&problem), alpha_(alpha) {
  if (!(alpha_ > 0.0)) throw ConfigError("admm: alpha must be positive");
  const Index n = problem_->n();
  const Index m = problem_->m();

  std::vector<Eigen::Triplet<double>> trip;
  const Matrix& H = problem_->H();
  const Matrix& G = problem_->G();
  for (Index i = 0; i < n; ++i)
    for (Index j = 0; j < n; ++j) {
      double v = H(i, j) + (i == j ? 1.0 / alpha_ : 0.0);
      if (v != 0.0) trip.emplace_back(i, j, v);
    }
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      if (G(i, j) != 0.0) {
        trip.emplace_back(n + i, j, G(i, j));
        trip.emplace_back(j, n + i, G(i, j));
      }
  kkt_.resize(n + m, n + m);
  kkt_.setFromTriplets(trip.begin(), trip.end());
  kkt_.makeCompressed();

  lu_.compute(kkt_);
  diag_.factorizations += 1;
  if (lu_.info() != Eigen::Success)
    throw FactorizationError("admm: saddle matrix factorization failed (G rank-deficient?)");
}

std::pair<Solution, ConvergenceTrace> AdmmSolver::run(const InitialIterates& init,
                                                      const StoppingRule& stop,
                                                      const TraceOptions& trace) {
  const QpProblem& p = *problem_;
  Vector z0 = init.z ? *init.z : Vector::Zero(p.n());
  if (z0.size() != p.n()) throw DimensionError("admm: initial z has wrong dimension");
  Vector wc = Vector::Zero(p.n());
  if (init.w) {
    // Map an equality-dual guess (z0, w0) to the consensus dual that makes
    // (z0, w0) a fixed point when it is optimal: w_c = alpha (H z0 + h + G^T w0).
    if (init.w->size() != p.m()) throw DimensionError("admm: initial w has wrong dimension");
    wc = alpha_ * (p.apply_H(z0) + p.h() + p.apply_Gt(*init.w));
  }
  return run_consensus(z0, wc, stop, trace);
}

std::pair<Solution, ConvergenceTrace> AdmmSolver::run_consensus(const Vector& z0,
                                                                const Vector& w_consensus0,
                                                                const StoppingRule& stop,
                                                                const TraceOptions& trace) {
  const QpProblem& p = *problem_;
  const Index n = p.n();
  const Index m = p.m();
  if (z0.size() != n || w_consensus0.size() != n)
    throw DimensionError("admm: initial iterate dimensions");

  Vector z = z0;
  Vector w = w_consensus0;
  Vector v = Vector::Zero(m);
  Vector rhs(n + m), sol(n + m), resid(n + m), y(n), gz(m), scratch(m);

  detail::UniformAverages avg;
  avg.init(n);
  RunRecorder recorder(p, trace);
  long iterations = 0;
  StopReason reason = StopReason::MaxIterations;

  for (long k = 1; k <= stop.max_iterations; ++k) {
    avg.add_hat(z);
    rhs.head(n) = -p.h() + (z + w) / alpha_;
    rhs.tail(m) = p.g();
    sol = lu_.solve(rhs);
    resid.noalias() = kkt_ * sol;
    resid -= rhs;
    double rinf = resid.lpNorm<Eigen::Infinity>();
    if (rinf > 1e-11) {
      // one step of iterative refinement
      sol += lu_.solve(-resid);
      resid.noalias() = kkt_ * sol;
      resid -= rhs;
      rinf = resid.lpNorm<Eigen::Infinity>();
    }
    diag_.max_linear_residual_inf = std::max(diag_.max_linear_residual_inf, rinf);
    y = sol.head(n);
    v = sol.tail(m);

    z = y - w;
    p.feasible_set().project_in_place(z);
    w += z - y;

    avg.add_tilde(z);
    check_finite(z, w, k, "admm");

    p.apply_G(z, gz);
    gz -= p.g();
    iterations = k;
    const bool fired = detail::feasibility_stop(p, stop, gz, avg.hat, avg.tilde, scratch);
    recorder.record(k, fired || k == stop.max_iterations, z, gz, avg.hat, k);
    if (fired) {
      reason = StopReason::FeasibilityTolerance;
      break;
    }
  }
  return {finalize(z, v, avg, iterations, iterations, reason), recorder.take()};
}

std::pair<Solution, ConvergenceTrace> admm_solve(const QpProblem& problem, double alpha,
                                                 const InitialIterates& init,
                                                 const StoppingRule& stop,
                                                 const TraceOptions& trace,
                                                 AdmmDiagnostics* diagnostics) {
  AdmmSolver solver(problem, alpha);
  auto out = solver.run(init, stop, trace);
  if (diagnostics) *diagnostics = solver.diagnostics();
  return out;
}

std::pair<Solution, ConvergenceTrace> chambolle_pock_const_solve(
    const QpProblem& problem, const SpectralBounds& bounds, double alpha, double beta,
    const InitialIterates& init, const StoppingRule& stop, const TraceOptions& trace) {
  bounds.validate();
  if (beta <= 0.0) beta = std::sqrt(bounds.lambda / bounds.sigma);
  if (alpha <= 0.0) alpha = 1.0 / (bounds.lambda + beta * bounds.sigma);
  if (alpha * (bounds.lambda + beta * bounds.sigma) > 1.0 + 1e-12)
    throw ConfigError("chambolle-pock: step sizes violate alpha (lambda + beta sigma) <= 1");

  Vector z = init.z ? *init.z : Vector::Zero(problem.n());
  Vector w = init.w ? *init.w : Vector::Zero(problem.m());
  if (z.size() != problem.n() || w.size() != problem.m())
    throw DimensionError("chambolle-pock: initial iterate dimensions");

  detail::UniformAverages avg;
  avg.init(problem.n());
  RunRecorder recorder(problem, trace);
  Vector grad(problem.n()), gtw(problem.n()), gz_old(problem.m()), gz_new(problem.m()),
      gz(problem.m()), scratch(problem.m());
  problem.apply_G(z, gz_old);

  long iterations = 0;
  StopReason reason = StopReason::MaxIterations;
  for (long k = 1; k <= stop.max_iterations; ++k) {
    avg.add_hat(z);
    problem.apply_H(z, grad);
    grad += problem.h();
    problem.apply_Gt(w, gtw);
    grad += gtw;
    z -= alpha * grad;
    problem.feasible_set().project_in_place(z);

    problem.apply_G(z, gz_new);
    // w-update with primal extrapolation: G(2 z_new - z_old) - g
    w += beta * (2.0 * gz_new - gz_old - problem.g());
    gz_old = gz_new;

    avg.add_tilde(z);
    check_finite(z, w, k, "chambolle-pock");

    gz = gz_new - problem.g();
    iterations = k;
    const bool fired = detail::feasibility_stop(problem, stop, gz, avg.hat, avg.tilde, scratch);
    recorder.record(k, fired || k == stop.max_iterations, z, gz, avg.hat, k);
    if (fired) {
      reason = StopReason::FeasibilityTolerance;
      break;
    }
  }
  Solution sol = finalize(z, w, avg, iterations, iterations, reason);
  return {std::move(sol), recorder.take()};
}

std::pair<Solution, ConvergenceTrace> chambolle_pock_accel_solve(
    const QpProblem& problem, const SpectralBounds& bounds, const InitialIterates& init,
    const StoppingRule& stop, const TraceOptions& trace) {
  bounds.validate();
  if (!(bounds.mu > 0.0))
    throw UnsupportedProblemError("accelerated chambolle-pock requires mu > 0");
  const double mu = bounds.mu;
  double beta = std::sqrt(bounds.lambda / bounds.sigma);
  double alpha = 1.0 / (bounds.lambda + beta * bounds.sigma);
  double gamma = 1.0;

  Vector z = init.z ? *init.z : Vector::Zero(problem.n());
  Vector w = init.w ? *init.w : Vector::Zero(problem.m());
  if (z.size() != problem.n() || w.size() != problem.m())
    throw DimensionError("chambolle-pock: initial iterate dimensions");
  Vector z_prev = z;

  detail::UniformAverages avg;
  avg.init(problem.n());
  RunRecorder recorder(problem, trace);
  Vector grad(problem.n()), gtw(problem.n()), extr(problem.n()), gz(problem.m()),
      scratch(problem.m());

  long iterations = 0;
  StopReason reason = StopReason::MaxIterations;
  for (long k = 1; k <= stop.max_iterations; ++k) {
    avg.add_hat(z);
    // dual update first, on the extrapolated primal point
    extr = z + gamma * (z - z_prev);
    problem.apply_G(extr, gz);
    gz -= problem.g();
    w += beta * gz;

    problem.apply_H(z, grad);
    grad += problem.h();
    problem.apply_Gt(w, gtw);
    grad += gtw;
    z_prev = z;
    z -= (alpha / (mu * alpha + 1.0)) * grad;
    problem.feasible_set().project_in_place(z);

    const double theta = 1.0 / std::sqrt(1.0 + mu * alpha);
    alpha *= theta;
    beta /= theta;
    gamma = theta;

    avg.add_tilde(z);
    check_finite(z, w, k, "accelerated chambolle-pock");

    problem.apply_G(z, gz);
    gz -= problem.g();
    iterations = k;
    const bool fired = detail::feasibility_stop(problem, stop, gz, avg.hat, avg.tilde, scratch);
    recorder.record(k, fired || k == stop.max_iterations, z, gz, avg.hat, k);
    if (fired) {
      reason = StopReason::FeasibilityTolerance;
      break;
    }
  }
  Solution sol = finalize(z, w, avg, iterations, iterations, reason);
  return {std::move(sol), recorder.take()};
}

}  // namespace pipg
