#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pipg {

/// Input dimensions do not match the problem or set.
class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Invalid solver or experiment configuration (bad step sizes, empty lists, ...).
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// The method cannot handle the given problem class (e.g. needs mu > 0).
class UnsupportedProblemError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite values detected while iterating.
class NumericalError : public std::runtime_error {
public:
  NumericalError(const std::string& what, long iteration)
      : std::runtime_error(what), iteration(iteration) {}
  long iteration = -1;
};

/// Matrix factorization failed (singular or rank-deficient input).
class FactorizationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Iterative eigenvalue estimation did not converge.
class ConvergenceError : public std::runtime_error {
public:
  ConvergenceError(const std::string& what, double last_estimate)
      : std::runtime_error(what), last_estimate(last_estimate) {}
  double last_estimate = 0.0;
};

/// 1-D root finder could not close its bracket; carries the last bracket seen.
class RootBracketError : public std::runtime_error {
public:
  RootBracketError(const std::string& what, double lo, double hi)
      : std::runtime_error(what), lo(lo), hi(hi) {}
  double lo = 0.0;
  double hi = 0.0;
};

/// Reference-solution certification failed (solver families disagree or
/// residual targets were not met). Carries both primal candidates when the
/// failure is a disagreement.
class CertificationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
  CertificationError(const std::string& what, std::vector<double> candidate_a,
                     std::vector<double> candidate_b)
      : std::runtime_error(what), candidate_a(std::move(candidate_a)),
        candidate_b(std::move(candidate_b)) {}
  std::vector<double> candidate_a;
  std::vector<double> candidate_b;
};

/// Malformed JSON input.
class ParseError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace pipg
