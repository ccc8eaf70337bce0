#pragma once

#include <stdexcept>
#include <string>

namespace fracoam {

/// Base class for recoverable failures reported by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-range configuration input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A quadrature, fit or decomposition did not meet its accuracy contract.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// File-system failure while reading or writing artifacts.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracoam
