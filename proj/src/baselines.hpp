#pragma once

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <utility>

#include "problem.hpp"
#include "solver_common.hpp"

namespace pipg {

/// Dual fast gradient method: gradient ascent on the dual with Nesterov
/// momentum k/(k+3) on the outer loop; the per-iteration Lagrangian argmin is
/// approximated by an inner Nesterov loop with momentum
/// (sqrt(lambda)-sqrt(mu))/(sqrt(lambda)+sqrt(mu)) and step 1/lambda,
/// warm-started from the previous outer iterate and terminated when
/// ||z^{j+1}-z^j|| / ||z^j|| <= inner_tol (absolute test when the denominator
/// underflows). Requires mu > 0. The trace counts every inner-loop
/// projection.
///
/// dual_step <= 0 selects the default mu/sigma, the inverse of the dual
/// gradient's Lipschitz constant sigma/mu.
std::pair<Solution, ConvergenceTrace> dual_fast_gradient_solve(
    const QpProblem& problem, const SpectralBounds& bounds, const InitialIterates& init,
    const StoppingRule& stop, double inner_tol, const TraceOptions& trace = {},
    double dual_step = 0.0);

/// Diagnostics for the saddle-system solves inside ADMM.
struct AdmmDiagnostics {
  long factorizations = 0;
  double max_linear_residual_inf = 0.0;
};

/// Consensus ADMM for the QP: the hyperplane copy y solves the saddle system
///   [ H + I/alpha  G^T ] [y]   [ -h + (z + w)/alpha ]
///   [ G            0   ] [v] = [  g                 ]
/// factorized once per (H, G, alpha) and reused every iteration; the set copy
/// is one projection z = proj_Z(y - w); the scaled dual integrates the copy
/// difference, w += z - y. Solution::w reports the equality multiplier v from
/// the saddle solve.
class AdmmSolver {
public:
  /// The problem must outlive the solver.
  AdmmSolver(const QpProblem& problem, double alpha);

  std::pair<Solution, ConvergenceTrace> run(const InitialIterates& init, const StoppingRule& stop,
                                            const TraceOptions& trace = {});

  /// Warm start that also seeds the consensus dual (used by the reference
  /// oracle to polish a candidate optimum).
  std::pair<Solution, ConvergenceTrace> run_consensus(const Vector& z0, const Vector& w_consensus0,
                                                      const StoppingRule& stop,
                                                      const TraceOptions& trace = {});

  const AdmmDiagnostics& diagnostics() const { return diag_; }
  double alpha() const { return alpha_; }

private:
  const QpProblem* problem_;
  double alpha_;
  Eigen::SparseMatrix<double> kkt_;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu_;
  AdmmDiagnostics diag_;
};

/// One-shot ADMM (constructs the factorization, runs, optionally reports the
/// saddle-solve diagnostics).
std::pair<Solution, ConvergenceTrace> admm_solve(const QpProblem& problem, double alpha,
                                                 const InitialIterates& init,
                                                 const StoppingRule& stop,
                                                 const TraceOptions& trace = {},
                                                 AdmmDiagnostics* diagnostics = nullptr);

/// Chambolle & Pock with constant steps: one projection per iteration,
///   z^{k+1} = proj_Z[z^k - alpha (H z^k + h + G^T w^k)]
///   w^{k+1} = w^k + beta (G (2 z^{k+1} - z^k) - g).
/// Step sizes must satisfy alpha (lambda + beta sigma) <= 1; alpha or beta
/// <= 0 selects the defaults beta = sqrt(lambda/sigma), alpha =
/// 1/(lambda + beta sigma), which mirror the constant PI projected gradient
/// schedule so projection counts compare like-for-like.
std::pair<Solution, ConvergenceTrace> chambolle_pock_const_solve(
    const QpProblem& problem, const SpectralBounds& bounds, double alpha, double beta,
    const InitialIterates& init, const StoppingRule& stop, const TraceOptions& trace = {});

/// Accelerated Chambolle & Pock: within one iteration the extrapolated dual
/// update precedes the primal update,
///   w^{k+1} = w^k + beta^k (G (z^k + gamma^k (z^k - z^{k-1})) - g)
///   z^{k+1} = proj_Z[z^k - alpha^k/(mu alpha^k + 1) (H z^k + h + G^T w^{k+1})].
/// Requires mu > 0.
///
/// Step-size recursion transcribed from A. Chambolle and T. Pock, "On the
/// ergodic convergence rates of a first-order primal-dual algorithm", Math.
/// Program. 159(1-2):253-287, 2016, Sec. 5.2 (the "optimal rule" for a
/// mu-strongly-convex objective):
///   theta_{k+1} = 1 / sqrt(1 + mu alpha^k),
///   alpha^{k+1} = theta_{k+1} alpha^k,
///   beta^{k+1}  = beta^k / theta_{k+1},
///   gamma^{k+1} = theta_{k+1},
/// initialized with beta^1 = sqrt(lambda/sigma), alpha^1 =
/// 1/(lambda + beta^1 sigma), gamma^1 = 1 (the first extrapolation is zero
/// because z^0 = z^1). The validity condition alpha^k (lambda + beta^k sigma)
/// <= 1 is preserved by the recursion since theta <= 1 keeps alpha^k beta^k
/// constant while 1/alpha^k grows.
std::pair<Solution, ConvergenceTrace> chambolle_pock_accel_solve(
    const QpProblem& problem, const SpectralBounds& bounds, const InitialIterates& init,
    const StoppingRule& stop, const TraceOptions& trace = {});

}  // namespace pipg
