#pragma once

#include <stdexcept>
#include <string>

namespace rydcopy {

/// Invalid physical configuration (bad layout, non-positive parameter, ...).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Numerical failure: non-converged solve, unstable integration, lost normalization.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rydcopy
