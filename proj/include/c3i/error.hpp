#pragma once

#include <stdexcept>
#include <string>

namespace c3i {

/// Base of every error raised by the library. The CLI maps the concrete
/// subclasses onto process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed, misaligned or otherwise unusable input data.
class DataError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration value or combination.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Rank deficiency, non-convergence, degenerate statistics.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace c3i
