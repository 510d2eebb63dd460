#pragma once

#include <utility>

#include "problem.hpp"
#include "solver_common.hpp"

namespace pipg {

/// Step-size rule for the PI projected gradient iteration.
///
/// Constant: alpha^k = 1/(beta*sigma + lambda), beta^k = beta, so the
/// descent condition lambda + sigma*beta^k = 1/alpha^k holds exactly at
/// every k. Valid for mu >= 0 and gives O(1/k) ergodic rates.
///
/// Varying: alpha^k = 2/((k+1)*mu + 2*lambda), beta^k = (k+1)*mu/(2*sigma).
/// Requires mu > 0 and improves the ergodic rates to O(1/k^2) for the
/// distance and O(1/k^3) for the constraint violation. Note
/// 1/alpha^k = (k+1)*mu/2 + lambda = sigma*beta^k + lambda.
class StepSchedule {
public:
  enum class Kind { Constant, Varying };

  /// beta <= 0 selects the default beta = sqrt(lambda/sigma), which balances
  /// the two terms of 1/alpha = beta*sigma + lambda.
  static StepSchedule constant(SpectralBounds bounds, double beta = 0.0);
  static StepSchedule varying(SpectralBounds bounds);

  Kind kind() const { return kind_; }
  const SpectralBounds& bounds() const { return bounds_; }
  double constant_beta() const { return beta_; }

  double alpha(long k) const {
    if (kind_ == Kind::Constant) return alpha_;
    return 2.0 / (static_cast<double>(k + 1) * bounds_.mu + 2.0 * bounds_.lambda);
  }
  double beta(long k) const {
    if (kind_ == Kind::Constant) return beta_;
    return static_cast<double>(k + 1) * bounds_.mu / (2.0 * bounds_.sigma);
  }

  /// Ergodic weights: the hat average weights iterate z^j (taken before step
  /// j) and the tilde average weights z^{j+1} (taken after it).
  double hat_weight(long k) const {
    if (kind_ == Kind::Constant) return 1.0;
    return static_cast<double>(k + 1) * static_cast<double>(k + 2);
  }
  double tilde_weight(long k) const {
    if (kind_ == Kind::Constant) return 1.0;
    return static_cast<double>(k + 2);
  }

private:
  StepSchedule(Kind kind, SpectralBounds bounds, double beta, double alpha)
      : kind_(kind), bounds_(bounds), beta_(beta), alpha_(alpha) {}

  Kind kind_;
  SpectralBounds bounds_;
  double beta_ = 0.0;   // constant schedule only
  double alpha_ = 0.0;  // constant schedule only
};

/// Mutable state of one PI projected gradient solve. Iteration counting
/// starts at k = 1 with (z, w) the initial iterates, so the (k+1) factors of
/// the varying schedule line up with the proven rates. After n steps the
/// state holds z = z^{n+1}, the averages over the first n iterations, and
/// k = n + 1.
struct SolverState {
  Vector z;
  Vector w;
  Vector v;
  long k = 1;

  Vector z_hat;    // weighted average of z^1..z^{k-1}
  Vector z_tilde;  // weighted average of z^2..z^k
  double hat_weight_sum = 0.0;
  double tilde_weight_sum = 0.0;
  long projections = 0;

  static SolverState make(const QpProblem& problem, const InitialIterates& init = {});
};

/// One iteration of the PI projected gradient method, in order:
///   v <- w + beta^k (G z - g)                     (proportional feedback)
///   z <- proj_Z[z - alpha^k (H z + h + G^T v)]    (projected gradient)
///   w <- w + beta^k (G z_new - g)                 (integral feedback)
/// All right-hand sides of the first two lines read the pre-step z. Exactly
/// one projection onto Z is performed. Both ergodic averages are updated and
/// k is incremented. Throws NumericalError if the iterates go non-finite.
void pipg_step(const QpProblem& problem, const StepSchedule& schedule, SolverState& state);

/// Iterates pipg_step until the stopping rule fires. Returns the final raw
/// and averaged iterates plus the trace; max-iteration exhaustion is a normal
/// return flagged in Solution::stop_reason.
std::pair<Solution, ConvergenceTrace> solve(const QpProblem& problem,
                                            const StepSchedule& schedule,
                                            const InitialIterates& init,
                                            const StoppingRule& stop,
                                            const TraceOptions& trace = {});

namespace detail {

/// Scratch buffers for the hot loop; lets solve() run allocation-free.
struct PipgWork {
  Vector gz;        // m
  Vector grad;      // n
  Vector gtv;       // n
  Vector scratch_m; // m

  void resize(const QpProblem& problem) {
    gz.resize(problem.m());
    grad.resize(problem.n());
    gtv.resize(problem.n());
    scratch_m.resize(problem.m());
  }
};

void pipg_step_impl(const QpProblem& problem, const StepSchedule& schedule, SolverState& state,
                    PipgWork& work);

}  // namespace detail
}  // namespace pipg
