#ifndef RIDESHARE_CORE_HPP_
#define RIDESHARE_CORE_HPP_

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>

namespace rideshare {

/// Absolute tolerance used for every cost, payment and time comparison.
inline constexpr double kTolerance = 1e-9;

/// Inputs whose cost magnitude exceeds this are rejected at ingestion.
inline constexpr double kMaxCostMagnitude = 1e12;

using Index = std::size_t;
inline constexpr Index kNoIndex = std::numeric_limits<Index>::max();

/// Malformed or out-of-contract user input. Maps to CLI exit code 1.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A library invariant was observed to be broken. Maps to CLI exit code 2.
class InvariantError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

inline bool approx_equal(double a, double b, double tol = kTolerance) {
  return std::fabs(a - b) <= tol;
}

inline bool definitely_less(double a, double b, double tol = kTolerance) {
  return a < b - tol;
}

inline void ensure(bool condition, const std::string& what) {
  if (!condition) throw InvariantError(what);
}

}  // namespace rideshare

#endif  // RIDESHARE_CORE_HPP_
