#pragma once

#include <Eigen/Core>

#include <functional>
#include <variant>
#include <vector>

namespace pipg {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Convex differentiable scalar-valued function given by value and gradient
/// callbacks; used by the epigraph and sublevel-set projections.
struct SmoothFunction {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
};

class ConvexSet;

/// {x : ||x||_2 <= radius}
struct Ball {
  double radius;
  Index dim;
};

/// {x : lower <= x <= upper}, +-inf entries permitted.
struct Box {
  Vector lower;
  Vector upper;
};

/// {x : <normal, x> <= offset}, normal != 0.
struct Halfspace {
  Vector normal;
  double offset;
};

/// {(y, a) : ||y||_2 <= a}; the last coordinate is a.
struct SecondOrderCone {
  Index dim;
};

/// {(y, a) : f(y) <= a}; the last coordinate is a, so f takes dim-1 arguments.
struct Epigraph {
  SmoothFunction f;
  Index dim;
};

/// {x : f(x) <= level}
struct Sublevel {
  SmoothFunction f;
  double level;
  Index dim;
};

/// Cartesian product of factors on contiguous coordinate blocks, in
/// declaration order.
struct Product {
  std::vector<ConvexSet> factors;
};

/// All of R^dim (no constraint).
struct Whole {
  Index dim;
};

/// A nonempty closed convex set with a cheap Euclidean projection. Tagged
/// union over the supported primitives plus Cartesian products thereof.
/// Instances are immutable after construction and safe to share across
/// threads; project() is a pure function.
class ConvexSet {
public:
  using Node =
      std::variant<Ball, Box, Halfspace, SecondOrderCone, Epigraph, Sublevel, Product, Whole>;

  ConvexSet(Ball b);                 // NOLINT(google-explicit-constructor)
  ConvexSet(Box b);                  // NOLINT
  ConvexSet(Halfspace h);            // NOLINT
  ConvexSet(SecondOrderCone s);      // NOLINT
  ConvexSet(Epigraph e);             // NOLINT
  ConvexSet(Sublevel s);             // NOLINT
  ConvexSet(Product p);              // NOLINT
  ConvexSet(Whole w);                // NOLINT

  Index dim() const { return dim_; }
  const Node& node() const { return node_; }

  /// Euclidean projection, computed in place. Points already in the set are
  /// left bit-identical.
  void project_in_place(Eigen::Ref<Vector> x) const;

  Vector project(const Vector& x) const {
    Vector out = x;
    project_in_place(out);
    return out;
  }

  /// Distance-based membership test: ||x - project(x)|| <= tol.
  bool contains(const Vector& x, double tol = 1e-10) const {
    return (x - project(x)).norm() <= tol;
  }

private:
  void validate() const;

  Node node_;
  Index dim_ = 0;
  // Product factor start offsets, precomputed at construction.
  std::vector<Index> offsets_;
};

/// Projection onto {x : f(x) <= level} for convex differentiable f, by 1-D
/// root finding on the resolvent parameter: find nu >= 0 with
/// f((I + nu grad f)^{-1}(x)) = level. Returns x unchanged when f(x) <= level.
Vector project_sublevel(const SmoothFunction& f, double level, const Vector& x);

/// Projection onto {(y, a) : f(y) <= a}. Same machinery as project_sublevel
/// with the target level a0 + nu moving along the root find.
Vector project_epigraph(const SmoothFunction& f, const Vector& x);

}  // namespace pipg
