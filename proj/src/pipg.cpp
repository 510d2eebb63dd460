#include "pipg.hpp"

#include <cmath>

#include "errors.hpp"

namespace pipg {

StepSchedule StepSchedule::constant(SpectralBounds bounds, double beta) {
  bounds.validate();
  if (beta <= 0.0) beta = std::sqrt(bounds.lambda / bounds.sigma);
  if (!std::isfinite(beta) || beta <= 0.0)
    throw ConfigError("constant schedule requires a positive finite beta");
  const double alpha = 1.0 / (beta * bounds.sigma + bounds.lambda);
  return StepSchedule(Kind::Constant, bounds, beta, alpha);
}

StepSchedule StepSchedule::varying(SpectralBounds bounds) {
  bounds.validate();
  if (!(bounds.mu > 0.0))
    throw ConfigError("varying schedule requires strictly positive mu (strong convexity)");
  return StepSchedule(Kind::Varying, bounds, 0.0, 0.0);
}

SolverState SolverState::make(const QpProblem& problem, const InitialIterates& init) {
  SolverState s;
  s.z = init.z ? *init.z : Vector::Zero(problem.n());
  s.w = init.w ? *init.w : Vector::Zero(problem.m());
  if (s.z.size() != problem.n()) throw DimensionError("initial z has wrong dimension");
  if (s.w.size() != problem.m()) throw DimensionError("initial w has wrong dimension");
  s.v = Vector::Zero(problem.m());
  s.z_hat = Vector::Zero(problem.n());
  s.z_tilde = Vector::Zero(problem.n());
  return s;
}

namespace detail {

void pipg_step_impl(const QpProblem& problem, const StepSchedule& schedule, SolverState& state,
                    PipgWork& work) {
  const long k = state.k;
  const double alpha = schedule.alpha(k);
  const double beta = schedule.beta(k);

  // The hat average absorbs the pre-step iterate z^k.
  state.hat_weight_sum += schedule.hat_weight(k);
  state.z_hat += (schedule.hat_weight(k) / state.hat_weight_sum) * (state.z - state.z_hat);

  problem.apply_G(state.z, work.gz);
  work.gz -= problem.g();
  state.v = state.w + beta * work.gz;

  problem.apply_H(state.z, work.grad);
  work.grad += problem.h();
  problem.apply_Gt(state.v, work.gtv);
  work.grad += work.gtv;
  state.z -= alpha * work.grad;
  problem.feasible_set().project_in_place(state.z);
  state.projections += 1;

  problem.apply_G(state.z, work.gz);
  work.gz -= problem.g();
  state.w += beta * work.gz;

  state.tilde_weight_sum += schedule.tilde_weight(k);
  state.z_tilde += (schedule.tilde_weight(k) / state.tilde_weight_sum) * (state.z - state.z_tilde);

  state.k = k + 1;
  if (!state.z.allFinite() || !state.w.allFinite())
    throw NumericalError("non-finite iterate in PI projected gradient step", k);
}

}  // namespace detail

void pipg_step(const QpProblem& problem, const StepSchedule& schedule, SolverState& state) {
  detail::PipgWork work;
  work.resize(problem);
  detail::pipg_step_impl(problem, schedule, state, work);
}

std::pair<Solution, ConvergenceTrace> solve(const QpProblem& problem,
                                            const StepSchedule& schedule,
                                            const InitialIterates& init,
                                            const StoppingRule& stop,
                                            const TraceOptions& trace) {
  SolverState state = SolverState::make(problem, init);
  detail::PipgWork work;
  work.resize(problem);

  RunRecorder recorder(problem, trace);
  StopReason reason = StopReason::MaxIterations;
  long iterations = 0;
  for (long k = 1; k <= stop.max_iterations; ++k) {
    detail::pipg_step_impl(problem, schedule, state, work);
    iterations = k;
    // work.gz still holds G z^{k+1} - g from the integral update.
    const bool fired = detail::feasibility_stop(problem, stop, work.gz, state.z_hat,
                                                state.z_tilde, work.scratch_m);
    recorder.record(k, fired || k == stop.max_iterations, state.z, work.gz, state.z_hat,
                    state.projections);
    if (fired) {
      reason = StopReason::FeasibilityTolerance;
      break;
    }
  }

  Solution sol;
  sol.z = state.z;
  sol.z_hat = state.z_hat;
  sol.z_tilde = state.z_tilde;
  sol.w = state.w;
  sol.iterations = iterations;
  sol.projections = state.projections;
  sol.stop_reason = reason;
  return {std::move(sol), recorder.take()};
}

}  // namespace pipg
