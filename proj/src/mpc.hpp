#pragma once

#include <vector>

#include "pipg.hpp"
#include "problem.hpp"
#include "thread_pool.hpp"

namespace pipg {

/// Finite-horizon tracking problem over t = 1..T:
///   minimize 0.5 sum ||x_t - y_t||^2_{Q_t} + 0.5 sum ||u_{t-1}||^2_{R_{t-1}}
///   subject to x_t = A_{t-1} x_{t-1} + B_{t-1} u_{t-1},
///              u_{t-1} in U_{t-1}, x_t in X_t.
/// Per-stage vectors are indexed 0..T-1: A[t-1], B[t-1], R[t-1], U[t-1]
/// correspond to stage matrices A_{t-1}, ...; Q[t-1], y[t-1], X[t-1]
/// correspond to Q_t, y_t, X_t.
struct TrackingProblem {
  int horizon = 0;  // T
  std::vector<Matrix> A;
  std::vector<Matrix> B;
  std::vector<Matrix> Q;
  std::vector<Matrix> R;
  std::vector<Vector> y;
  std::vector<ConvexSet> X;
  std::vector<ConvexSet> U;
  Vector x0;

  Index nx() const { return x0.size(); }
  Index nu() const { return B.empty() ? 0 : B.front().cols(); }
  Index num_vars() const { return horizon * (nx() + nu()); }

  void validate() const;
};

/// Offsets of the stage blocks inside the stacked variable
/// z = [u_0; x_1; u_1; x_2; ...; u_{T-1}; x_T].
inline Index input_offset(const TrackingProblem& tp, int t) {  // t = 1..T
  return static_cast<Index>(t - 1) * (tp.nu() + tp.nx());
}
inline Index state_offset(const TrackingProblem& tp, int t) {  // t = 1..T
  return input_offset(tp, t) + tp.nu();
}

/// Rewrites the tracking problem as an equality-constrained QP:
/// H = blkdiag(R_0, Q_1, ..., R_{T-1}, Q_T), h stacks [0; -Q_t y_t], G is the
/// block-banded dynamics matrix with stage rows [-A_{t-1}, -B_{t-1}, I]
/// (first stage [-B_0, I] with A_0 x_0 moved into g), and
/// Z = prod_t (U_{t-1} x X_t).
QpProblem lift(const TrackingProblem& tp);

/// Stacks per-stage inputs/states into the lifted layout and back.
Vector pack_trajectory(const TrackingProblem& tp, const std::vector<Vector>& u,
                       const std::vector<Vector>& x);
void unpack_trajectory(const TrackingProblem& tp, const Vector& z, std::vector<Vector>& u,
                       std::vector<Vector>& x);

/// One PI projected gradient iteration executed stage-wise in three
/// barrier-separated phases so stage updates within a phase are independent:
///   phase 1: v_t = w_t + beta (x_t - A_{t-1} x_{t-1} - B_{t-1} u_{t-1})
///   phase 2: u_{t-1} and x_t projected-gradient updates from the iteration
///            snapshot (with the boundary convention A_T v_{T+1} = 0)
///   phase 3: w_t integral update from the phase-2 outputs.
/// All phase-1/2 reads use the pre-step snapshot, matching the lifted
/// iteration rather than an in-place sweep over t. The state layout is the
/// lifted one, so SolverState is shared with the lifted solver; the
/// projection counter advances by one lifted-equivalent projection per call
/// (each stage set is touched exactly once).
///
/// A thread pool may be supplied to run the stage updates of each phase in
/// parallel; every stage writes only its own slots, so the result is
/// identical to serial execution.
void structured_pipg_step(const TrackingProblem& tp, const StepSchedule& schedule,
                          SolverState& state, ThreadPool* pool = nullptr);

/// Loop around structured_pipg_step with the shared stopping rules. The
/// feasibility stop and trace are evaluated on the lifted problem, which must
/// be lift(tp) (passed in so callers can share one lifted instance).
std::pair<Solution, ConvergenceTrace> structured_pipg_solve(
    const TrackingProblem& tp, const QpProblem& lifted, const StepSchedule& schedule,
    const InitialIterates& init, const StoppingRule& stop, const TraceOptions& trace = {},
    ThreadPool* pool = nullptr);

/// The trajectory-planning benchmark scenario: double-integrator dynamics
/// with 0.5 s sampling, diagonal tracking weights, an input-norm ball of
/// radius 0.1, a velocity-norm ball of radius 0.25, and a keep-out zone
/// convexified per stage by a rotating halfspace
/// <(-cos(theta t), sin(theta t)), p> >= 2 with rate theta = 0.063. The
/// reference is a beeline from (-2.5, 0.6) to (2.9, 0.3) sampled uniformly
/// over T steps with zero reference velocity (the trajectory fields are plain
/// data, so callers needing a different reference parameterization can
/// overwrite y).
TrackingProblem build_benchmark(int T);

}  // namespace pipg
