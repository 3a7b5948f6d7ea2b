#pragma once

#include <stdexcept>
#include <string>

namespace gpscatter {

/// Violated precondition on an argument (bad grid size, out-of-range parameter).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A computation that could not produce a trustworthy number: non-convergence,
/// blow-up, an integrand tail too heavy to truncate.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument(what);
}

}  // namespace gpscatter
