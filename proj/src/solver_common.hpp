#pragma once

#include <chrono>
#include <optional>
#include <utility>

#include "problem.hpp"

namespace pipg {

/// Which iterate a feasibility stopping test reads.
enum class IterateKind { Raw, AvgHat, AvgTilde };

enum class StopReason { FeasibilityTolerance, MaxIterations };

/// Loop control: iteration cap plus an optional tolerance on ||Gz - g||_inf,
/// evaluated on a configurable iterate. Hitting the iteration cap is a normal
/// return flagged by StopReason, not an error.
///
/// Note the two averaged sequences cover different index windows (the hat
/// average spans z^1..z^k, the tilde average z^2..z^{k+1}); feasibility
/// stopping defaults to the hat average.
struct StoppingRule {
  long max_iterations = 10000;
  std::optional<double> feas_tol_inf;
  IterateKind stop_on = IterateKind::AvgHat;
};

struct InitialIterates {
  std::optional<Vector> z;
  std::optional<Vector> w;
};

/// Final iterates of a solve. z_hat / z_tilde are the solver's ergodic
/// averages (schedule-weighted for the PI projected gradient method, uniform
/// for the baselines). w is the equality-constraint dual.
struct Solution {
  Vector z;
  Vector z_hat;
  Vector z_tilde;
  Vector w;
  long iterations = 0;
  long projections = 0;
  StopReason stop_reason = StopReason::MaxIterations;
};

struct TraceOptions {
  bool enabled = false;
  long stride = 1;                    // record every stride-th iteration, plus the last
  std::optional<Vector> reference;    // z* for the distance columns
};

/// Builds a ConvergenceTrace during a solve. The caller hands in the fresh
/// raw residual vector each iteration (solvers already compute G z - g for
/// their dual updates); averaged-iterate quantities cost one extra matvec and
/// are only computed on recorded iterations.
class RunRecorder {
public:
  RunRecorder(const QpProblem& problem, TraceOptions options)
      : problem_(problem), options_(std::move(options)),
        last_time_(std::chrono::steady_clock::now()), last_recorded_k_(0) {
    if (options_.stride < 1) options_.stride = 1;
  }

  bool enabled() const { return options_.enabled; }

  void record(long k, bool is_last, const Vector& z_raw, const Vector& gz_minus_g_raw,
              const Vector& z_avg, long projections) {
    if (!options_.enabled) return;
    if (k % options_.stride != 0 && !is_last) return;
    if (is_last && k == last_recorded_k_) return;

    TraceRecord rec;
    rec.k = k;
    rec.feas_sq = gz_minus_g_raw.squaredNorm();
    rec.feas_inf = gz_minus_g_raw.lpNorm<Eigen::Infinity>();
    Vector gz_avg = problem_.apply_G(z_avg) - problem_.g();
    rec.feas_sq_avg = gz_avg.squaredNorm();
    rec.feas_inf_avg = gz_avg.lpNorm<Eigen::Infinity>();
    if (options_.reference) {
      const Vector& zs = *options_.reference;
      Vector d = z_raw - zs;
      rec.dist_sq = d.squaredNorm();
      rec.dist_hsq = d.dot(problem_.apply_H(d));
      d = z_avg - zs;
      rec.dist_sq_avg = d.squaredNorm();
      rec.dist_hsq_avg = d.dot(problem_.apply_H(d));
    }
    rec.projections = projections;
    const auto now = std::chrono::steady_clock::now();
    const long covered = k - last_recorded_k_;
    rec.seconds = std::chrono::duration<double>(now - last_time_).count() /
                  static_cast<double>(covered > 0 ? covered : 1);
    last_time_ = now;
    last_recorded_k_ = k;
    trace_.append(rec);
  }

  ConvergenceTrace take() { return std::move(trace_); }

private:
  const QpProblem& problem_;
  TraceOptions options_;
  ConvergenceTrace trace_;
  std::chrono::steady_clock::time_point last_time_;
  long last_recorded_k_;
};

namespace detail {

/// Uniform running averages used by the baseline solvers' trace columns.
struct UniformAverages {
  Vector hat;
  Vector tilde;
  double count_hat = 0.0;
  double count_tilde = 0.0;

  void init(Index n) {
    hat = Vector::Zero(n);
    tilde = Vector::Zero(n);
    count_hat = count_tilde = 0.0;
  }
  void add_hat(const Vector& z) {
    count_hat += 1.0;
    hat += (z - hat) / count_hat;
  }
  void add_tilde(const Vector& z) {
    count_tilde += 1.0;
    tilde += (z - tilde) / count_tilde;
  }
};

/// True when the stopping rule's feasibility test fires for this iteration.
/// gz_minus_g_raw must hold G z_raw - g for the current raw iterate.
inline bool feasibility_stop(const QpProblem& problem, const StoppingRule& stop,
                             const Vector& gz_minus_g_raw, const Vector& z_hat,
                             const Vector& z_tilde, Vector& scratch_m) {
  if (!stop.feas_tol_inf) return false;
  double v = 0.0;
  switch (stop.stop_on) {
    case IterateKind::Raw:
      v = gz_minus_g_raw.lpNorm<Eigen::Infinity>();
      break;
    case IterateKind::AvgHat:
      problem.apply_G(z_hat, scratch_m);
      v = (scratch_m - problem.g()).lpNorm<Eigen::Infinity>();
      break;
    case IterateKind::AvgTilde:
      problem.apply_G(z_tilde, scratch_m);
      v = (scratch_m - problem.g()).lpNorm<Eigen::Infinity>();
      break;
  }
  return v <= *stop.feas_tol_inf;
}

}  // namespace detail
}  // namespace pipg
