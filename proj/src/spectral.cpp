#include "spectral.hpp"

#include <cmath>
#include <functional>

#include "errors.hpp"
#include "rng.hpp"

namespace pipg {

namespace {

constexpr int kPowerMaxIter = 5000;
constexpr double kPowerRayleighTol = 1e-6;
constexpr std::uint64_t kPowerSeed = 0x9e3779b97f4a7c15ULL;

/// Power iteration for the largest eigenvalue of a symmetric PSD operator,
/// given as a matvec. Deterministic: the start vector comes from a fixed seed.
double power_largest(Index dim, const std::function<void(const Vector&, Vector&)>& op) {
  Xoshiro256 rng(kPowerSeed);
  Vector x(dim);
  for (Index i = 0; i < dim; ++i) x[i] = rng.normal();
  const double nx = x.norm();
  if (nx == 0.0) x.setOnes();
  x /= x.norm();

  Vector y(dim);
  double rayleigh = 0.0;
  double prev = 0.0;
  for (int it = 0; it < kPowerMaxIter; ++it) {
    op(x, y);
    rayleigh = x.dot(y);
    const double ny = y.norm();
    if (ny == 0.0) return 0.0;  // operator is zero on the current iterate
    x = y / ny;
    if (it > 0 && std::abs(rayleigh - prev) <= kPowerRayleighTol * std::max(1.0, std::abs(rayleigh)))
      return rayleigh;
    prev = rayleigh;
  }
  throw ConvergenceError("power iteration did not converge within 5000 iterations", rayleigh);
}

}  // namespace

SpectralBounds estimate_bounds(const QpProblem& problem, double tolerance) {
  if (!(tolerance > 0.0)) throw ConfigError("estimate_bounds: tolerance must be positive");

  SpectralBounds b;

  if (problem.h_is_diagonal()) {
    const Vector d = problem.H().diagonal();
    b.mu = d.minCoeff();
    b.lambda = d.maxCoeff();
  } else {
    const Matrix& H = problem.H();
    const double lam_est =
        power_largest(problem.n(), [&](const Vector& x, Vector& y) { y.noalias() = H * x; });
    b.lambda = lam_est * (1.0 + tolerance);
    // Smallest eigenvalue via shifted power iteration on (lambda*I - H).
    const double shift = b.lambda;
    const double shifted_est = power_largest(problem.n(), [&](const Vector& x, Vector& y) {
      y.noalias() = shift * x - H * x;
    });
    double mu_est = shift - shifted_est * (1.0 + tolerance);
    b.mu = std::max(0.0, mu_est * (1.0 - tolerance));
  }

  // sigma: power iteration on G^T G without forming it.
  Vector gz(problem.m());
  const double sigma_est = power_largest(problem.n(), [&](const Vector& x, Vector& y) {
    problem.apply_G(x, gz);
    problem.apply_Gt(gz, y);
  });
  b.sigma = std::max(sigma_est * (1.0 + tolerance), 1e-12);
  b.lambda = std::max(b.lambda, 1e-12);

  // Borderline strong convexity degrades to the mu = 0 schedules.
  if (b.mu <= 1e-9 * b.lambda) b.mu = 0.0;

  b.validate();
  return b;
}

}  // namespace pipg
