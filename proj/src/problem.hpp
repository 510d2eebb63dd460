#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cmath>
#include <limits>
#include <vector>

#include "convex_set.hpp"

namespace pipg {

/// Scalars (mu, lambda, sigma) with mu*I <= H <= lambda*I and G^T G <= sigma*I.
/// Every step-size rule consumes these; any valid bounds keep the proven
/// rates, looser bounds just slow convergence.
struct SpectralBounds {
  double mu = 0.0;
  double lambda = 0.0;
  double sigma = 0.0;

  void validate() const;
};

/// The three optimality residuals at a primal-dual pair (z, w):
///   primal_eq    = ||G z - g||_2
///   primal_set   = ||z - proj_Z(z)||_2
///   stationarity = ||z - proj_Z(z - (H z + h + G^T w))||_2
/// The stationarity field is the projected-gradient fixed-point residual; it
/// vanishes exactly where the variational optimality condition holds, and
/// unlike that condition it is finitely checkable.
struct KktResidual {
  double primal_eq = 0.0;
  double primal_set = 0.0;
  double stationarity = 0.0;

  double max() const { return std::max(primal_eq, std::max(primal_set, stationarity)); }
};

/// Equality-constrained QP over a simple convex set:
///   minimize 0.5 z^T H z + h^T z   subject to  G z = g,  z in Z.
///
/// H is symmetrized to (H + H^T)/2 at construction (a warning is emitted if
/// the asymmetry exceeds 1e-9). Matrices are stored dense; a compressed
/// sparse copy of G and a diagonal fast path for H are prepared when the
/// structure warrants it (MPC-lifted problems have block-banded G and
/// block-diagonal H). Problems are immutable after construction and safe to
/// share across threads.
class QpProblem {
public:
  QpProblem(Matrix H, Vector h, Matrix G, Vector g, ConvexSet feasible_set);

  Index n() const { return h_.size(); }
  Index m() const { return g_.size(); }

  const Matrix& H() const { return H_; }
  const Vector& h() const { return h_; }
  const Matrix& G() const { return G_; }
  const Vector& g() const { return g_; }
  const ConvexSet& feasible_set() const { return set_; }

  bool h_is_diagonal() const { return H_diagonal_; }

  /// y = H z, using the diagonal fast path when H is diagonal.
  void apply_H(const Vector& z, Vector& y) const;
  /// y = G z, using the sparse copy when G is sparse enough.
  void apply_G(const Vector& z, Vector& y) const;
  /// y = G^T w.
  void apply_Gt(const Vector& w, Vector& y) const;

  Vector apply_H(const Vector& z) const {
    Vector y(n());
    apply_H(z, y);
    return y;
  }
  Vector apply_G(const Vector& z) const {
    Vector y(m());
    apply_G(z, y);
    return y;
  }
  Vector apply_Gt(const Vector& w) const {
    Vector y(n());
    apply_Gt(w, y);
    return y;
  }

  /// 0.5 z^T H z + h^T z
  double objective(const Vector& z) const;

  KktResidual kkt_residual(const Vector& z, const Vector& w) const;

private:
  Matrix H_;
  Vector h_;
  Matrix G_;
  Vector g_;
  ConvexSet set_;

  bool H_diagonal_ = false;
  Vector H_diag_;
  bool G_sparse_ = false;
  Eigen::SparseMatrix<double> G_sp_;
  Eigen::SparseMatrix<double> Gt_sp_;
};

/// One row of a convergence trace. Distance columns are NaN when no reference
/// solution was supplied. Averaged columns track the solver's primary ergodic
/// sequence (the hat average for the PI projected gradient schedules, the
/// uniform average for the baselines).
struct TraceRecord {
  long k = 0;
  double feas_sq = 0.0;
  double feas_inf = 0.0;
  double feas_sq_avg = 0.0;
  double feas_inf_avg = 0.0;
  double dist_sq = std::numeric_limits<double>::quiet_NaN();
  double dist_hsq = std::numeric_limits<double>::quiet_NaN();
  double dist_sq_avg = std::numeric_limits<double>::quiet_NaN();
  double dist_hsq_avg = std::numeric_limits<double>::quiet_NaN();
  long projections = 0;
  double seconds = 0.0;
};

/// Per-iteration record of the quantities the benchmark plots: feasibility
/// violation in both norms for raw and averaged iterates, distances to a
/// reference when available, and the cumulative projection count that serves
/// as the cross-solver cost metric.
class ConvergenceTrace {
public:
  void append(TraceRecord rec);
  const std::vector<TraceRecord>& records() const { return records_; }
  bool empty() const { return records_.empty(); }
  std::size_t size() const { return records_.size(); }
  const TraceRecord& back() const { return records_.back(); }

private:
  std::vector<TraceRecord> records_;
};

}  // namespace pipg
