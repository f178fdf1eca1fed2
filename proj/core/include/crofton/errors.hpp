#pragma once

#include <stdexcept>
#include <string>

namespace crofton {

/// Parameters outside the domain of a function or operation.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A series or iteration failed to converge within its budget.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested (body, route) combination is not implemented.
class UnsupportedError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Rotational formulae need the origin off the boundary of the body. A polygon
/// with a vertex at the origin is the standard counterexample: every line
/// section has Euler characteristic 1, but the boundary integral is undefined
/// because the support elements at the origin carry positive measure.
class OriginOnBoundaryError : public DomainError {
 public:
  explicit OriginOnBoundaryError(double distance)
      : DomainError("origin lies on the boundary of the body (distance " +
                    std::to_string(distance) +
                    "); rotational Crofton formulae are undefined there"),
        distance_(distance) {}
  double distance() const { return distance_; }

 private:
  double distance_;
};

}  // namespace crofton
