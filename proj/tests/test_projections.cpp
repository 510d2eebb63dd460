#include <cmath>
#include <limits>

#include "convex_set.hpp"
#include "doctest.h"
#include "errors.hpp"
#include "rng.hpp"

using namespace pipg;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vector vec2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}

Vector vec3(double a, double b, double c) {
  Vector v(3);
  v << a, b, c;
  return v;
}

SmoothFunction squared_norm() {
  return {[](const Vector& x) { return x.squaredNorm(); },
          [](const Vector& x) { return Vector(2.0 * x); }};
}

/// Constraint violation measured directly from each set's defining
/// inequalities, independent of the projection code it checks.
double direct_violation(const ConvexSet& set, const Vector& x) {
  return std::visit(
      [&](const auto& s) -> double {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Ball>) {
          return std::max(0.0, x.norm() - s.radius);
        } else if constexpr (std::is_same_v<T, Box>) {
          double worst = 0.0;
          for (Index i = 0; i < x.size(); ++i) {
            worst = std::max(worst, s.lower[i] - x[i]);
            worst = std::max(worst, x[i] - s.upper[i]);
          }
          return worst;
        } else if constexpr (std::is_same_v<T, Halfspace>) {
          return std::max(0.0, (s.normal.dot(x) - s.offset) / s.normal.norm());
        } else if constexpr (std::is_same_v<T, SecondOrderCone>) {
          return std::max(0.0, x.head(x.size() - 1).norm() - x[x.size() - 1]);
        } else if constexpr (std::is_same_v<T, Epigraph>) {
          return std::max(0.0, s.f.value(x.head(x.size() - 1)) - x[x.size() - 1]);
        } else if constexpr (std::is_same_v<T, Sublevel>) {
          return std::max(0.0, s.f.value(x) - s.level);
        } else if constexpr (std::is_same_v<T, Product>) {
          double worst = 0.0;
          Index at = 0;
          for (const auto& f : s.factors) {
            worst = std::max(worst, direct_violation(f, x.segment(at, f.dim())));
            at += f.dim();
          }
          return worst;
        } else {
          return 0.0;  // Whole
        }
      },
      set.node());
}

}  // namespace

TEST_CASE("ball projection: 3-4-5 example and identity inside") {
  ConvexSet ball(Ball{1.0, 2});
  Vector p = ball.project(vec2(3.0, 4.0));
  CHECK(p[0] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.8).epsilon(1e-14));

  Vector inside = vec2(0.3, -0.4);
  CHECK((ball.project(inside) - inside).norm() == 0.0);
}

TEST_CASE("box projection clamps elementwise, infinite bounds allowed") {
  Vector lo = Vector::Zero(3);
  Vector hi = Vector::Ones(3);
  ConvexSet box(Box{lo, hi});
  Vector p = box.project(vec3(-1.0, 0.5, 2.0));
  CHECK(p[0] == 0.0);
  CHECK(p[1] == 0.5);
  CHECK(p[2] == 1.0);

  Vector lo2 = vec2(-kInf, 0.0);
  Vector hi2 = vec2(0.0, kInf);
  ConvexSet halfbox(Box{lo2, hi2});
  Vector q = halfbox.project(vec2(-100.0, 100.0));
  CHECK(q[0] == -100.0);
  CHECK(q[1] == 100.0);
  CHECK((halfbox.project(vec2(5.0, -5.0)) - vec2(0.0, 0.0)).norm() == 0.0);
}

TEST_CASE("halfspace projection uses the exact 1/||a||^2 correction") {
  ConvexSet hs(Halfspace{vec2(2.0, 0.0), 2.0});
  Vector p = hs.project(vec2(3.0, 0.0));
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-14));

  // Brute-force check: scan the boundary line {2 z1 = 2} for the closest
  // point to x.
  Vector x = vec2(3.0, 0.7);
  Vector proj = hs.project(x);
  double best = kInf;
  Vector best_pt = vec2(1.0, 0.0);
  for (double s = -10.0; s <= 10.0; s += 1e-4) {
    Vector cand = vec2(1.0, s);
    const double d = (cand - x).norm();
    if (d < best) {
      best = d;
      best_pt = cand;
    }
  }
  CHECK((proj - best_pt).norm() <= 2e-4);
  CHECK((proj - x).norm() <= best + 1e-12);
}

TEST_CASE("second-order cone projection branches") {
  ConvexSet soc(SecondOrderCone{3});

  // outside: scaling branch with factor (||y|| + a) / (2 ||y||) = 4/6
  Vector p = soc.project(vec3(3.0, 0.0, 1.0));
  CHECK(p[0] == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-14));
  CHECK(p[2] == doctest::Approx(2.0).epsilon(1e-14));

  // polar branch: ||y|| <= -a collapses to the origin
  CHECK(soc.project(vec3(1.0, 0.0, -2.0)).norm() == 0.0);

  // inside: identity
  Vector inside = vec3(0.5, 0.5, 2.0);
  CHECK((soc.project(inside) - inside).norm() == 0.0);

  // boundary tie ||y|| = -a: both branches give the origin
  CHECK(soc.project(vec3(1.0, 0.0, -1.0)).norm() == 0.0);
}

TEST_CASE("product projects factor blocks in declaration order") {
  std::vector<ConvexSet> factors;
  factors.emplace_back(Box{Vector::Zero(1), Vector::Ones(1)});
  factors.emplace_back(Ball{1.0, 2});
  ConvexSet prod(Product{std::move(factors)});
  CHECK(prod.dim() == 3);
  Vector p = prod.project(vec3(5.0, 3.0, 4.0));
  CHECK(p[0] == 1.0);
  CHECK(p[1] == doctest::Approx(0.6).epsilon(1e-14));
  CHECK(p[2] == doctest::Approx(0.8).epsilon(1e-14));

  // nested product
  std::vector<ConvexSet> outer;
  outer.emplace_back(prod);
  outer.emplace_back(Whole{2});
  ConvexSet nested(Product{std::move(outer)});
  CHECK(nested.dim() == 5);
  Vector q(5);
  q << 5.0, 3.0, 4.0, 7.0, -7.0;
  Vector pq = nested.project(q);
  CHECK(pq[0] == 1.0);
  CHECK(pq[3] == 7.0);
  CHECK(pq[4] == -7.0);
}

TEST_CASE("sublevel projection: quadratic matches the unit ball") {
  Vector x = vec2(2.0, 0.0);
  Vector p = project_sublevel(squared_norm(), 1.0, x);
  CHECK(p[0] == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(p[1] == doctest::Approx(0.0).epsilon(1e-10));

  // {x : ||x||^2 <= 1} is the unit ball; cross-check on random points.
  ConvexSet ball(Ball{1.0, 3});
  Xoshiro256 rng(42);
  for (int i = 0; i < 50; ++i) {
    Vector y(3);
    for (Index j = 0; j < 3; ++j) y[j] = 3.0 * rng.normal();
    Vector a = project_sublevel(squared_norm(), 1.0, y);
    Vector b = ball.project(y);
    CHECK((a - b).norm() <= 1e-9);
  }
}

TEST_CASE("sublevel projection: affine function matches the halfspace formula") {
  Xoshiro256 rng(7);
  for (int i = 0; i < 50; ++i) {
    Vector a(3);
    for (Index j = 0; j < 3; ++j) a[j] = rng.normal();
    if (a.norm() < 1e-3) continue;
    const double offset = rng.normal();
    SmoothFunction affine{[a](const Vector& x) { return a.dot(x); },
                          [a](const Vector&) { return a; }};
    ConvexSet hs(Halfspace{a, offset});
    Vector x(3);
    for (Index j = 0; j < 3; ++j) x[j] = 4.0 * rng.normal();
    CHECK((project_sublevel(affine, offset, x) - hs.project(x)).norm() <= 1e-9);
  }
}

TEST_CASE("sublevel projection returns x when already feasible") {
  Vector x = vec2(0.5, 0.5);
  CHECK((project_sublevel(squared_norm(), 1.0, x) - x).norm() == 0.0);
}

TEST_CASE("epigraph projection solves the shifted level problem") {
  // {(y, a) : y^2 <= a} in 2-D, point (2, 0): brute-force the boundary curve.
  SmoothFunction sq{[](const Vector& y) { return y.squaredNorm(); },
                    [](const Vector& y) { return Vector(2.0 * y); }};
  ConvexSet epi(Epigraph{sq, 2});
  Vector x = vec2(2.0, 0.0);
  Vector p = epi.project(x);
  double best = kInf;
  Vector best_pt = vec2(0, 0);
  for (double t = -3.0; t <= 3.0; t += 1e-5) {
    Vector cand = vec2(t, t * t);
    const double d = (cand - x).norm();
    if (d < best) {
      best = d;
      best_pt = cand;
    }
  }
  CHECK((p - best_pt).norm() <= 1e-4);
  CHECK(direct_violation(epi, p) <= 1e-10);

  Vector inside = vec2(0.5, 1.0);
  CHECK((epi.project(inside) - inside).norm() == 0.0);
}

TEST_CASE("root finder reports an unreachable bracket") {
  // constant function above the level: the resolvent never moves, so the
  // bracket grows until the guard trips
  SmoothFunction flat{[](const Vector&) { return 2.0; },
                      [](const Vector& x) { return Vector(Vector::Zero(x.size())); }};
  CHECK_THROWS_AS(project_sublevel(flat, 1.0, vec2(1.0, 1.0)), RootBracketError);
}

TEST_CASE("construction and projection errors") {
  CHECK_THROWS_AS(ConvexSet(Ball{0.0, 2}), ConfigError);
  CHECK_THROWS_AS(ConvexSet(Ball{-1.0, 2}), ConfigError);
  CHECK_THROWS_AS(ConvexSet(Halfspace{Vector::Zero(2), 1.0}), ConfigError);
  CHECK_THROWS_AS(ConvexSet(Box{Vector::Ones(2), Vector::Zero(2)}), ConfigError);
  CHECK_THROWS_AS(ConvexSet(Box{Vector::Zero(2), Vector::Ones(3)}), DimensionError);
  CHECK_THROWS_AS(ConvexSet(Product{{}}), ConfigError);

  ConvexSet ball(Ball{1.0, 2});
  CHECK_THROWS_AS(ball.project(vec3(1, 2, 3)), DimensionError);
}

namespace {

/// Draws a random set (with its dimension) for the law suite.
ConvexSet random_set(Xoshiro256& rng, int depth = 0) {
  const int kinds = depth > 0 ? 7 : 8;  // products only nest one level
  switch (rng.next_u64() % kinds) {
    case 0:
      return ConvexSet(Ball{0.2 + 2.0 * rng.uniform(), 2 + static_cast<Index>(rng.next_u64() % 3)});
    case 1: {
      const Index d = 2 + static_cast<Index>(rng.next_u64() % 3);
      Vector lo(d), hi(d);
      for (Index i = 0; i < d; ++i) {
        const double a = 2.0 * rng.normal();
        const double b = 2.0 * rng.normal();
        lo[i] = std::min(a, b);
        hi[i] = std::max(a, b);
        if (rng.uniform() < 0.15) lo[i] = -kInf;
        if (rng.uniform() < 0.15) hi[i] = kInf;
      }
      return ConvexSet(Box{lo, hi});
    }
    case 2: {
      const Index d = 2 + static_cast<Index>(rng.next_u64() % 3);
      Vector a(d);
      double n2 = 0.0;
      do {
        for (Index i = 0; i < d; ++i) a[i] = rng.normal();
        n2 = a.squaredNorm();
      } while (n2 < 1e-6);
      return ConvexSet(Halfspace{a, rng.normal()});
    }
    case 3:
      return ConvexSet(SecondOrderCone{2 + static_cast<Index>(rng.next_u64() % 3)});
    case 4:
      return ConvexSet(Whole{1 + static_cast<Index>(rng.next_u64() % 4)});
    case 5: {
      // sublevel of a convex quadratic x'Dx with positive diagonal D
      const Index d = 2 + static_cast<Index>(rng.next_u64() % 2);
      Vector diag(d);
      for (Index i = 0; i < d; ++i) diag[i] = 0.5 + rng.uniform();
      SmoothFunction f{[diag](const Vector& x) { return x.dot(diag.cwiseProduct(x)); },
                       [diag](const Vector& x) { return Vector(2.0 * diag.cwiseProduct(x)); }};
      return ConvexSet(Sublevel{f, 0.5 + rng.uniform(), d});
    }
    case 6: {
      const Index d = 2 + static_cast<Index>(rng.next_u64() % 2);
      Vector diag(d - 1);
      for (Index i = 0; i < d - 1; ++i) diag[i] = 0.5 + rng.uniform();
      SmoothFunction f{[diag](const Vector& y) { return y.dot(diag.cwiseProduct(y)); },
                       [diag](const Vector& y) { return Vector(2.0 * diag.cwiseProduct(y)); }};
      return ConvexSet(Epigraph{f, d});
    }
    default: {
      std::vector<ConvexSet> factors;
      const int count = 2 + static_cast<int>(rng.next_u64() % 3);
      for (int i = 0; i < count; ++i) factors.push_back(random_set(rng, depth + 1));
      return ConvexSet(Product{std::move(factors)});
    }
  }
}

Vector random_point(Xoshiro256& rng, Index dim, double scale) {
  Vector x(dim);
  for (Index i = 0; i < dim; ++i) x[i] = scale * rng.normal();
  return x;
}

}  // namespace

TEST_CASE("projection laws on randomized sets and points") {
  Xoshiro256 rng(20240229);
  const double tol = 1e-10;
  for (int trial = 0; trial < 600; ++trial) {
    ConvexSet set = random_set(rng);
    const Index d = set.dim();

    Vector x = random_point(rng, d, 3.0);
    Vector px = set.project(x);

    // membership and idempotence
    CHECK(direct_violation(set, px) <= tol);
    CHECK((set.project(px) - px).norm() <= tol);

    // non-expansiveness
    Vector y = random_point(rng, d, 3.0);
    Vector py = set.project(y);
    CHECK((px - py).norm() <= (x - y).norm() + tol);

    // variational inequality: <proj(z) - z, z' - proj(z)> >= 0 for z' in the set
    Vector zp = set.project(random_point(rng, d, 2.0));
    CHECK((px - x).dot(zp - px) >= -tol);
  }
}

TEST_CASE("2-D brute-force grid oracle agrees with the closed forms") {
  Xoshiro256 rng(555);
  std::vector<ConvexSet> sets;
  sets.emplace_back(Ball{1.3, 2});
  sets.emplace_back(Box{vec2(-0.8, -0.2), vec2(0.4, 1.1)});
  sets.emplace_back(Halfspace{vec2(1.5, -0.7), 0.3});
  {
    std::vector<ConvexSet> f;
    f.emplace_back(Box{Vector::Constant(1, -0.5), Vector::Constant(1, 0.5)});
    f.emplace_back(Ball{0.7, 1});
    sets.emplace_back(Product{std::move(f)});
  }

  const double step = 0.01;
  for (const auto& set : sets) {
    for (int trial = 0; trial < 5; ++trial) {
      // sample inside the scan window so the grid always sees the optimum
      Vector x = vec2(3.2 * rng.uniform() - 1.6, 3.2 * rng.uniform() - 1.6);
      Vector p = set.project(x);
      double best = kInf;
      for (double a = -2.0; a <= 2.0; a += step)
        for (double b = -2.0; b <= 2.0; b += step) {
          Vector cand = vec2(a, b);
          if (direct_violation(set, cand) > 1e-12) continue;
          best = std::min(best, (cand - x).norm());
        }
      // the projection can beat the grid by at most one cell diagonal
      CHECK((p - x).norm() <= best + 1e-12);
      CHECK(best <= (p - x).norm() + step * 1.5);
    }
  }
}
