#pragma once

#include <stdexcept>

namespace ddcomb {

/// Raised when an input violates a configuration invariant.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when a numerical procedure fails to converge or loses its certificate.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ddcomb
