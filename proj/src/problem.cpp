#include "problem.hpp"

#include <iostream>

#include "errors.hpp"

namespace pipg {

void SpectralBounds::validate() const {
  if (!(mu >= 0.0)) throw ConfigError("spectral bound mu must be nonnegative");
  if (!(lambda >= mu)) throw ConfigError("spectral bounds require mu <= lambda");
  if (!(sigma > 0.0)) throw ConfigError("spectral bound sigma must be positive");
}

QpProblem::QpProblem(Matrix H, Vector h, Matrix G, Vector g, ConvexSet feasible_set)
    : H_(std::move(H)), h_(std::move(h)), G_(std::move(G)), g_(std::move(g)),
      set_(std::move(feasible_set)) {
  const Index n = h_.size();
  const Index m = g_.size();
  if (H_.rows() != n || H_.cols() != n)
    throw DimensionError("H must be n x n with n = dim(h)");
  if (G_.rows() != m || G_.cols() != n)
    throw DimensionError("G must be m x n with m = dim(g)");
  if (m > n) throw DimensionError("G cannot have more rows than columns (m <= n)");
  if (set_.dim() != n)
    throw DimensionError("feasible set dimension does not match problem dimension");

  const double scale = std::max(1.0, H_.cwiseAbs().maxCoeff());
  const double asym = (H_ - H_.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-9 * scale)
    std::cerr << "pipg: warning: H asymmetry " << asym
              << " exceeds 1e-9, symmetrizing to (H + H^T)/2\n";
  H_ = ((H_ + H_.transpose()) * 0.5).eval();

  H_diagonal_ = true;
  for (Index i = 0; i < n && H_diagonal_; ++i)
    for (Index j = 0; j < n; ++j)
      if (i != j && H_(i, j) != 0.0) {
        H_diagonal_ = false;
        break;
      }
  if (H_diagonal_) H_diag_ = H_.diagonal();

  // Keep a compressed copy of G when it is sparse enough for the matvec to
  // win; the lifted MPC constraint matrix is block-banded.
  Index nnz = 0;
  for (Index i = 0; i < m; ++i)
    for (Index j = 0; j < n; ++j)
      if (G_(i, j) != 0.0) ++nnz;
  if (m * n >= 512 && nnz * 2 < m * n) {
    G_sparse_ = true;
    G_sp_ = G_.sparseView();
    G_sp_.makeCompressed();
    Gt_sp_ = G_sp_.transpose();
    Gt_sp_.makeCompressed();
  }
}

void QpProblem::apply_H(const Vector& z, Vector& y) const {
  if (z.size() != n()) throw DimensionError("apply_H: dim(z) != n");
  if (H_diagonal_)
    y = H_diag_.cwiseProduct(z);
  else
    y.noalias() = H_ * z;
}

void QpProblem::apply_G(const Vector& z, Vector& y) const {
  if (z.size() != n()) throw DimensionError("apply_G: dim(z) != n");
  if (G_sparse_)
    y.noalias() = G_sp_ * z;
  else
    y.noalias() = G_ * z;
}

void QpProblem::apply_Gt(const Vector& w, Vector& y) const {
  if (w.size() != m()) throw DimensionError("apply_Gt: dim(w) != m");
  if (G_sparse_)
    y.noalias() = Gt_sp_ * w;
  else
    y.noalias() = G_.transpose() * w;
}

double QpProblem::objective(const Vector& z) const {
  if (z.size() != n()) throw DimensionError("objective: dim(z) != n");
  return 0.5 * z.dot(apply_H(z)) + h_.dot(z);
}

KktResidual QpProblem::kkt_residual(const Vector& z, const Vector& w) const {
  if (z.size() != n()) throw DimensionError("kkt_residual: dim(z) != n");
  if (w.size() != m()) throw DimensionError("kkt_residual: dim(w) != m");
  KktResidual r;
  r.primal_eq = (apply_G(z) - g_).norm();
  r.primal_set = (z - set_.project(z)).norm();
  Vector grad = apply_H(z) + h_ + apply_Gt(w);
  r.stationarity = (z - set_.project(z - grad)).norm();
  return r;
}

void ConvergenceTrace::append(TraceRecord rec) {
  if (!records_.empty()) {
    if (rec.k <= records_.back().k)
      throw ConfigError("trace iteration indices must be strictly increasing");
    if (rec.projections < records_.back().projections)
      throw ConfigError("trace projection count must be nondecreasing");
  }
  records_.push_back(rec);
}

}  // namespace pipg
