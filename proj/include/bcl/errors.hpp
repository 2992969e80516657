#pragma once

#include <stdexcept>
#include <string>

namespace bcl {

/// Raised when a caller passes sizes, ranges or shapes that violate a
/// precondition.
class ArgumentError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an internal numerical routine fails (singular solve, two
/// independent computations disagreeing beyond tolerance).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace tol {
/// Row sums of probability vectors.
inline constexpr double kProbability = 1e-12;
/// Weights at or below this are outside the support.
inline constexpr double kSupport = 1e-14;
}  // namespace tol

}  // namespace bcl
