#include "convex_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include "errors.hpp"

namespace pipg {

namespace {

Index node_dim(const ConvexSet::Node& node) {
  return std::visit(
      [](const auto& s) -> Index {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) return s.dim;
        if constexpr (std::is_same_v<T, Box>) return s.lower.size();
        if constexpr (std::is_same_v<T, Halfspace>) return s.normal.size();
        if constexpr (std::is_same_v<T, SecondOrderCone>) return s.dim;
        if constexpr (std::is_same_v<T, Epigraph>) return s.dim;
        if constexpr (std::is_same_v<T, Sublevel>) return s.dim;
        if constexpr (std::is_same_v<T, Whole>) return s.dim;
        if constexpr (std::is_same_v<T, Product>) {
          Index total = 0;
          for (const auto& f : s.factors) total += f.dim();
          return total;
        }
      },
      node);
}

}  // namespace

ConvexSet::ConvexSet(Ball b) : node_(std::move(b)) {
  dim_ = node_dim(node_);
  validate();
}
ConvexSet::ConvexSet(Box b) : node_(std::move(b)) {
  dim_ = node_dim(node_);
  validate();
}
ConvexSet::ConvexSet(Halfspace h) : node_(std::move(h)) {
  dim_ = node_dim(node_);
  validate();
}
ConvexSet::ConvexSet(SecondOrderCone s) : node_(std::move(s)) {
  dim_ = node_dim(node_);
  validate();
}
ConvexSet::ConvexSet(Epigraph e) : node_(std::move(e)) {
  dim_ = node_dim(node_);
  validate();
}
ConvexSet::ConvexSet(Sublevel s) : node_(std::move(s)) {
  dim_ = node_dim(node_);
  validate();
}
ConvexSet::ConvexSet(Product p) : node_(std::move(p)) {
  dim_ = node_dim(node_);
  const auto& factors = std::get<Product>(node_).factors;
  offsets_.reserve(factors.size());
  Index at = 0;
  for (const auto& f : factors) {
    offsets_.push_back(at);
    at += f.dim();
  }
  validate();
}
ConvexSet::ConvexSet(Whole w) : node_(std::move(w)) {
  dim_ = node_dim(node_);
  validate();
}

void ConvexSet::validate() const {
  std::visit(
      [](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          if (!(s.radius > 0.0)) throw ConfigError("ball radius must be positive");
          if (s.dim < 1) throw DimensionError("ball dimension must be >= 1");
        } else if constexpr (std::is_same_v<T, Box>) {
          if (s.lower.size() != s.upper.size())
            throw DimensionError("box bound vectors differ in length");
          if (s.lower.size() < 1) throw DimensionError("box dimension must be >= 1");
          for (Index i = 0; i < s.lower.size(); ++i)
            if (!(s.lower[i] <= s.upper[i]))
              throw ConfigError("box requires lower <= upper elementwise");
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          if (s.normal.size() < 1) throw DimensionError("halfspace dimension must be >= 1");
          if (s.normal.squaredNorm() == 0.0)
            throw ConfigError("halfspace normal must be nonzero");
        } else if constexpr (std::is_same_v<T, SecondOrderCone>) {
          if (s.dim < 1) throw DimensionError("second-order cone dimension must be >= 1");
        } else if constexpr (std::is_same_v<T, Epigraph>) {
          if (s.dim < 2) throw DimensionError("epigraph dimension must be >= 2");
          if (!s.f.value || !s.f.gradient)
            throw ConfigError("epigraph requires value and gradient callbacks");
        } else if constexpr (std::is_same_v<T, Sublevel>) {
          if (s.dim < 1) throw DimensionError("sublevel dimension must be >= 1");
          if (!s.f.value || !s.f.gradient)
            throw ConfigError("sublevel set requires value and gradient callbacks");
        } else if constexpr (std::is_same_v<T, Product>) {
          if (s.factors.empty()) throw ConfigError("product of sets must have factors");
        } else if constexpr (std::is_same_v<T, Whole>) {
          if (s.dim < 1) throw DimensionError("whole-space dimension must be >= 1");
        }
      },
      node_);
}

namespace {

void project_ball(const Ball& b, Eigen::Ref<Vector> x) {
  const double nv = x.norm();
  if (nv > b.radius) x *= b.radius / nv;
}

void project_box(const Box& b, Eigen::Ref<Vector> x) {
  for (Index i = 0; i < x.size(); ++i)
    x[i] = std::min(std::max(x[i], b.lower[i]), b.upper[i]);
}

void project_halfspace(const Halfspace& h, Eigen::Ref<Vector> x) {
  // Exact formula divides by ||a||^2; the unnormalized a/||a|| variant is
  // only correct for unit normals and fails the membership property.
  const double s = h.normal.dot(x) - h.offset;
  if (s > 0.0) x -= (s / h.normal.squaredNorm()) * h.normal;
}

void project_soc(Eigen::Ref<Vector> x) {
  const Index d = x.size();
  const double a = x[d - 1];
  const double ny = x.head(d - 1).norm();
  if (ny <= -a) {
    x.setZero();
  } else if (ny <= a) {
    // inside the cone
  } else {
    const double c = (ny + a) / (2.0 * ny);
    x.head(d - 1) *= c;
    x[d - 1] = c * ny;
  }
}

}  // namespace

void ConvexSet::project_in_place(Eigen::Ref<Vector> x) const {
  if (x.size() != dim_)
    throw DimensionError("projection input has dimension " + std::to_string(x.size()) +
                         ", set has dimension " + std::to_string(dim_));
  std::visit(
      [&](const auto& s) {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          project_ball(s, x);
        } else if constexpr (std::is_same_v<T, Box>) {
          project_box(s, x);
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          project_halfspace(s, x);
        } else if constexpr (std::is_same_v<T, SecondOrderCone>) {
          project_soc(x);
        } else if constexpr (std::is_same_v<T, Epigraph>) {
          Vector out = project_epigraph(s.f, x);
          x = out;
        } else if constexpr (std::is_same_v<T, Sublevel>) {
          Vector out = project_sublevel(s.f, s.level, x);
          x = out;
        } else if constexpr (std::is_same_v<T, Product>) {
          for (std::size_t i = 0; i < s.factors.size(); ++i)
            s.factors[i].project_in_place(x.segment(offsets_[i], s.factors[i].dim()));
        } else if constexpr (std::is_same_v<T, Whole>) {
          // identity
        }
      },
      node_);
}

namespace {

constexpr int kResolventMaxIter = 500;
constexpr int kRootMaxIter = 200;

/// Solve p + nu*grad_f(p) = x for p. The residual map is strongly monotone
/// (Jacobian I + nu*H_f with H_f >= 0), so damped fixed-point steps
/// p <- p - tau*r contract once tau is inside the stable range. Each
/// iteration probes tau and tau/2 and keeps whichever shrinks the residual
/// more (a single fixed tau can land on a barely-contracting mode); if
/// neither shrinks it, tau halves until one does. tau never grows.
Vector resolvent(const SmoothFunction& f, double nu, const Vector& x, double tol) {
  Vector p = x;
  Vector r = nu * f.gradient(p);  // p + nu*grad - x with p = x
  double rn = r.norm();
  double tau = 1.0;

  const auto probe = [&](double step, Vector& p_out, Vector& r_out) {
    p_out = p - step * r;
    r_out = p_out + nu * f.gradient(p_out) - x;
    return r_out.norm();
  };

  Vector p_a, r_a, p_b, r_b;
  for (int it = 0; it < kResolventMaxIter; ++it) {
    if (rn <= tol) return p;
    double rn_a = probe(tau, p_a, r_a);
    const double rn_b = probe(0.5 * tau, p_b, r_b);
    if (rn_b < rn_a) {
      tau *= 0.5;
      rn_a = rn_b;
      p_a.swap(p_b);
      r_a.swap(r_b);
    }
    int halvings = 0;
    while (rn_a >= rn && halvings < 60) {
      tau *= 0.5;
      rn_a = probe(tau, p_a, r_a);
      ++halvings;
    }
    if (rn_a >= rn)
      throw RootBracketError("resolvent iteration stalled", nu, nu);
    p.swap(p_a);
    r.swap(r_a);
    rn = rn_a;
  }
  if (rn > tol) throw RootBracketError("resolvent iteration did not converge", nu, nu);
  return p;
}

/// Decreasing scalar map phi(nu) whose root defines the projection; epi_shift
/// is 1 for epigraph sets (target level a0 + nu) and 0 for sublevel sets.
struct LevelGap {
  const SmoothFunction& f;
  const Vector& x;
  double level;
  double epi_shift;
  double point_tol;

  double operator()(double nu, Vector& p_out) const {
    p_out = resolvent(f, nu, x, point_tol);
    return f.value(p_out) - (level + epi_shift * nu);
  }
};

/// Safeguarded secant/bisection hybrid for the decreasing map phi on
/// [0, inf). phi(0) > 0 is the caller's precondition.
Vector solve_level_root(const LevelGap& phi, double f_tol) {
  double lo = 0.0;
  Vector p;
  double phi_lo = phi(lo, p);
  if (phi_lo <= f_tol) return p;

  // Bracket the root by geometric growth.
  double hi = 1.0;
  double phi_hi = phi(hi, p);
  int grow = 0;
  while (phi_hi > 0.0) {
    lo = hi;
    phi_lo = phi_hi;
    hi *= 4.0;
    if (++grow > 60)
      throw RootBracketError("failed to bracket the level-set root", lo, hi);
    phi_hi = phi(hi, p);
  }

  double nu = hi;
  double phi_nu = phi_hi;
  for (int it = 0; it < kRootMaxIter; ++it) {
    if (std::abs(phi_nu) <= f_tol) return p;
    if (phi_nu > 0.0) {
      lo = nu;
      phi_lo = phi_nu;
    } else {
      hi = nu;
      phi_hi = phi_nu;
    }
    // Secant candidate, guarded to the current bracket interior.
    double cand = (phi_lo != phi_hi)
                      ? lo + phi_lo * (hi - lo) / (phi_lo - phi_hi)
                      : 0.5 * (lo + hi);
    const double margin = 1e-3 * (hi - lo);
    if (!(cand > lo + margin && cand < hi - margin)) cand = 0.5 * (lo + hi);
    nu = cand;
    phi_nu = phi(nu, p);
  }
  throw RootBracketError("level-set root find exceeded max iterations", lo, hi);
}

}  // namespace

Vector project_sublevel(const SmoothFunction& f, double level, const Vector& x) {
  if (f.value(x) <= level) return x;
  // Stop well inside the documented |f - level| <= 1e-10 max(1,|level|)
  // contract so downstream property checks at 1e-10 have headroom.
  const double f_tol = 1e-12 * std::max(1.0, std::abs(level));
  const double point_tol = 1e-13 * std::max(1.0, x.norm());
  LevelGap phi{f, x, level, 0.0, point_tol};
  return solve_level_root(phi, f_tol);
}

Vector project_epigraph(const SmoothFunction& f, const Vector& x) {
  const Index d = x.size();
  const Vector y0 = x.head(d - 1);
  const double a0 = x[d - 1];
  if (f.value(y0) <= a0) return x;
  const double f_tol = 1e-12 * std::max(1.0, std::abs(a0));
  const double point_tol = 1e-13 * std::max(1.0, y0.norm());
  LevelGap phi{f, y0, a0, 1.0, point_tol};
  Vector y = solve_level_root(phi, f_tol);
  Vector out(d);
  out.head(d - 1) = y;
  out[d - 1] = f.value(y);
  return out;
}

}  // namespace pipg
