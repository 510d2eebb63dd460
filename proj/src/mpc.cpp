#include "mpc.hpp"

#include <cmath>

#include "errors.hpp"

namespace pipg {

void TrackingProblem::validate() const {
  if (horizon < 1) throw ConfigError("tracking problem horizon must be >= 1");
  const std::size_t T = static_cast<std::size_t>(horizon);
  if (A.size() != T || B.size() != T || Q.size() != T || R.size() != T || y.size() != T ||
      X.size() != T || U.size() != T)
    throw DimensionError("tracking problem per-stage lists must all have length T");
  const Index nx_ = x0.size();
  const Index nu_ = B.front().cols();
  if (nx_ < 1 || nu_ < 1) throw DimensionError("tracking problem needs nx >= 1 and nu >= 1");
  for (std::size_t i = 0; i < T; ++i) {
    if (A[i].rows() != nx_ || A[i].cols() != nx_)
      throw DimensionError("A matrices must be nx x nx");
    if (B[i].rows() != nx_ || B[i].cols() != nu_)
      throw DimensionError("B matrices must be nx x nu");
    if (Q[i].rows() != nx_ || Q[i].cols() != nx_)
      throw DimensionError("Q matrices must be nx x nx");
    if (R[i].rows() != nu_ || R[i].cols() != nu_)
      throw DimensionError("R matrices must be nu x nu");
    if (y[i].size() != nx_) throw DimensionError("reference vectors must have length nx");
    if (X[i].dim() != nx_) throw DimensionError("state sets must have dimension nx");
    if (U[i].dim() != nu_) throw DimensionError("input sets must have dimension nu");
    const double qasym = (Q[i] - Q[i].transpose()).cwiseAbs().maxCoeff();
    const double rasym = (R[i] - R[i].transpose()).cwiseAbs().maxCoeff();
    if (qasym > 1e-9 || rasym > 1e-9)
      throw ConfigError("tracking weights must be symmetric");
  }
}

QpProblem lift(const TrackingProblem& tp) {
  tp.validate();
  const int T = tp.horizon;
  const Index nx = tp.nx();
  const Index nu = tp.nu();
  const Index n = tp.num_vars();
  const Index m = static_cast<Index>(T) * nx;

  Matrix H = Matrix::Zero(n, n);
  Vector h = Vector::Zero(n);
  Matrix G = Matrix::Zero(m, n);
  Vector g = Vector::Zero(m);
  std::vector<ConvexSet> factors;
  factors.reserve(2 * static_cast<std::size_t>(T));

  for (int t = 1; t <= T; ++t) {
    const Index uo = input_offset(tp, t);
    const Index xo = state_offset(tp, t);
    const Index ro = static_cast<Index>(t - 1) * nx;
    const auto& Q = tp.Q[t - 1];
    const auto& R = tp.R[t - 1];

    H.block(uo, uo, nu, nu) = R;
    H.block(xo, xo, nx, nx) = Q;
    h.segment(xo, nx) = -Q * tp.y[t - 1];

    G.block(ro, xo, nx, nx) = Matrix::Identity(nx, nx);
    G.block(ro, uo, nx, nu) = -tp.B[t - 1];
    if (t == 1)
      g.segment(ro, nx) = tp.A[0] * tp.x0;
    else
      G.block(ro, state_offset(tp, t - 1), nx, nx) = -tp.A[t - 1];

    factors.push_back(tp.U[t - 1]);
    factors.push_back(tp.X[t - 1]);
  }

  return QpProblem(std::move(H), std::move(h), std::move(G), std::move(g),
                   ConvexSet(Product{std::move(factors)}));
}

Vector pack_trajectory(const TrackingProblem& tp, const std::vector<Vector>& u,
                       const std::vector<Vector>& x) {
  const int T = tp.horizon;
  if (u.size() != static_cast<std::size_t>(T) || x.size() != static_cast<std::size_t>(T))
    throw DimensionError("pack_trajectory: need T inputs and T states");
  Vector z(tp.num_vars());
  for (int t = 1; t <= T; ++t) {
    z.segment(input_offset(tp, t), tp.nu()) = u[t - 1];
    z.segment(state_offset(tp, t), tp.nx()) = x[t - 1];
  }
  return z;
}

void unpack_trajectory(const TrackingProblem& tp, const Vector& z, std::vector<Vector>& u,
                       std::vector<Vector>& x) {
  if (z.size() != tp.num_vars()) throw DimensionError("unpack_trajectory: dim(z)");
  u.assign(static_cast<std::size_t>(tp.horizon), Vector());
  x.assign(static_cast<std::size_t>(tp.horizon), Vector());
  for (int t = 1; t <= tp.horizon; ++t) {
    u[t - 1] = z.segment(input_offset(tp, t), tp.nu());
    x[t - 1] = z.segment(state_offset(tp, t), tp.nx());
  }
}

namespace {

/// Stage-parallel body shared by the serial and pooled paths.
struct StructuredStep {
  const TrackingProblem& tp;
  double alpha;
  double beta;
  const Vector& z;       // iteration snapshot
  const Vector& w;       // iteration snapshot
  Vector& v;             // phase-1 output
  Vector& z_next;        // phase-2 output
  Vector& w_next;        // phase-3 output

  void phase1(Index ti) const {
    const int t = static_cast<int>(ti) + 1;
    const Index nx = tp.nx();
    const Index ro = ti * nx;
    Vector r = z.segment(state_offset(tp, t), nx) -
               tp.B[t - 1] * z.segment(input_offset(tp, t), tp.nu());
    if (t == 1)
      r -= tp.A[0] * tp.x0;
    else
      r -= tp.A[t - 1] * z.segment(state_offset(tp, t - 1), nx);
    v.segment(ro, nx) = w.segment(ro, nx) + beta * r;
  }

  void phase2(Index ti) const {
    const int t = static_cast<int>(ti) + 1;
    const Index nx = tp.nx();
    const Index nu = tp.nu();
    const Index uo = input_offset(tp, t);
    const Index xo = state_offset(tp, t);
    const Index ro = ti * nx;

    Vector du = tp.R[t - 1] * z.segment(uo, nu) - tp.B[t - 1].transpose() * v.segment(ro, nx);
    z_next.segment(uo, nu) = z.segment(uo, nu) - alpha * du;
    tp.U[t - 1].project_in_place(z_next.segment(uo, nu));

    Vector dx = tp.Q[t - 1] * (z.segment(xo, nx) - tp.y[t - 1]) + v.segment(ro, nx);
    if (t < tp.horizon) dx -= tp.A[t].transpose() * v.segment(ro + nx, nx);  // A_T v_{T+1} = 0
    z_next.segment(xo, nx) = z.segment(xo, nx) - alpha * dx;
    tp.X[t - 1].project_in_place(z_next.segment(xo, nx));
  }

  void phase3(Index ti) const {
    const int t = static_cast<int>(ti) + 1;
    const Index nx = tp.nx();
    const Index ro = ti * nx;
    Vector r = z_next.segment(state_offset(tp, t), nx) -
               tp.B[t - 1] * z_next.segment(input_offset(tp, t), tp.nu());
    if (t == 1)
      r -= tp.A[0] * tp.x0;
    else
      r -= tp.A[t - 1] * z_next.segment(state_offset(tp, t - 1), nx);
    w_next.segment(ro, nx) = w.segment(ro, nx) + beta * r;
  }
};

void run_phase(ThreadPool* pool, Index count, const std::function<void(Index)>& fn) {
  if (pool)
    pool->parallel_for(0, count, fn);
  else
    for (Index i = 0; i < count; ++i) fn(i);
}

}  // namespace

void structured_pipg_step(const TrackingProblem& tp, const StepSchedule& schedule,
                          SolverState& state, ThreadPool* pool) {
  const long k = state.k;
  const double alpha = schedule.alpha(k);
  const double beta = schedule.beta(k);
  const Index T = tp.horizon;

  state.hat_weight_sum += schedule.hat_weight(k);
  state.z_hat += (schedule.hat_weight(k) / state.hat_weight_sum) * (state.z - state.z_hat);

  if (state.v.size() != state.w.size()) state.v = Vector::Zero(state.w.size());
  Vector z_next(state.z.size());
  Vector w_next(state.w.size());
  StructuredStep step{tp, alpha, beta, state.z, state.w, state.v, z_next, w_next};

  run_phase(pool, T, [&](Index ti) { step.phase1(ti); });
  run_phase(pool, T, [&](Index ti) { step.phase2(ti); });
  run_phase(pool, T, [&](Index ti) { step.phase3(ti); });

  state.z = std::move(z_next);
  state.w = std::move(w_next);
  state.projections += 1;  // one lifted-equivalent projection: each stage set touched once

  state.tilde_weight_sum += schedule.tilde_weight(k);
  state.z_tilde += (schedule.tilde_weight(k) / state.tilde_weight_sum) * (state.z - state.z_tilde);
  state.k = k + 1;
  if (!state.z.allFinite() || !state.w.allFinite())
    throw NumericalError("non-finite iterate in structured PI projected gradient step", k);
}

std::pair<Solution, ConvergenceTrace> structured_pipg_solve(
    const TrackingProblem& tp, const QpProblem& lifted, const StepSchedule& schedule,
    const InitialIterates& init, const StoppingRule& stop, const TraceOptions& trace,
    ThreadPool* pool) {
  SolverState state = SolverState::make(lifted, init);
  RunRecorder recorder(lifted, trace);
  Vector gz(lifted.m()), scratch(lifted.m());

  StopReason reason = StopReason::MaxIterations;
  long iterations = 0;
  for (long k = 1; k <= stop.max_iterations; ++k) {
    structured_pipg_step(tp, schedule, state, pool);
    iterations = k;
    lifted.apply_G(state.z, gz);
    gz -= lifted.g();
    const bool fired =
        detail::feasibility_stop(lifted, stop, gz, state.z_hat, state.z_tilde, scratch);
    recorder.record(k, fired || k == stop.max_iterations, state.z, gz, state.z_hat,
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

TrackingProblem build_benchmark(int T) {
  if (T < 1) throw ConfigError("benchmark horizon must be >= 1");
  TrackingProblem tp;
  tp.horizon = T;

  Matrix A(4, 4);
  A << 1, 0, 0.5, 0,
       0, 1, 0, 0.5,
       0, 0, 1, 0,
       0, 0, 0, 1;
  Matrix B(4, 2);
  B << 0.125, 0,
       0, 0.125,
       0.5, 0,
       0, 0.5;
  const Matrix Q = Eigen::Vector4d(1.0, 0.5, 1.0, 0.5).asDiagonal();
  const Matrix R = Eigen::Vector2d(1.0, 0.5).asDiagonal();

  const double theta = 0.063;
  const Eigen::Vector2d p_start(-2.5, 0.6);
  const Eigen::Vector2d p_target(2.9, 0.3);
  tp.x0 = Vector::Zero(4);
  tp.x0 << -2.5, 0.6, 0.0, 0.0;

  for (int t = 1; t <= T; ++t) {
    tp.A.push_back(A);
    tp.B.push_back(B);
    tp.Q.push_back(Q);
    tp.R.push_back(R);

    Vector yt = Vector::Zero(4);
    const double frac = static_cast<double>(t) / static_cast<double>(T);
    yt.head(2) = p_start + frac * (p_target - p_start);
    tp.y.push_back(yt);

    // Keep-out zone convexified per stage: <(-cos(theta t), sin(theta t)), p> >= 2,
    // stored as the halfspace <(cos(theta t), -sin(theta t)), p> <= -2.
    Vector normal(2);
    normal << std::cos(theta * t), -std::sin(theta * t);
    std::vector<ConvexSet> xt_factors;
    xt_factors.emplace_back(Halfspace{normal, -2.0});
    xt_factors.emplace_back(Ball{0.25, 2});
    tp.X.emplace_back(Product{std::move(xt_factors)});

    tp.U.emplace_back(Ball{0.1, 2});
  }
  return tp;
}

}  // namespace pipg
