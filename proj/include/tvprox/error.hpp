#pragma once

#include <stdexcept>
#include <string>

namespace tvprox {

/// Operands whose extents do not line up.
class ShapeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A ratio whose denominator vanished; the caller decides how to proceed.
class ZeroDenominatorError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative method produced a non-finite iterate or otherwise gave up.
class SolverAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed experiment configuration (bad key, value, or file).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace tvprox
