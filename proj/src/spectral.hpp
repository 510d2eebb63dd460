#pragma once

#include "problem.hpp"

namespace pipg {

/// Estimates (mu, lambda, sigma) for a problem: lambda and sigma are power
/// iteration estimates inflated by (1 + tolerance) so they remain valid upper
/// bounds, mu is a deflated lower bound on the smallest eigenvalue of H. For
/// diagonal H the (mu, lambda) pair is exact and no inflation is applied.
/// sigma is estimated matrix-free via alternating G / G^T products.
///
/// If the mu estimate is not safely positive (<= 1e-9 * lambda), mu is
/// reported as 0 so callers route to the schedules that do not require strong
/// convexity.
SpectralBounds estimate_bounds(const QpProblem& problem, double tolerance);

}  // namespace pipg
