#pragma once

#include <stdexcept>
#include <string>

namespace hbatk {

/// Base of every exception thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Precondition or type-invariant violation (bad argument, invalid record).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A spectral query outside the sampled range. Never answered with zero.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// Fit failure: non-convergence, singular design, too few usable points.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Regime check on a series failed under an abort policy.
class RegimeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Malformed or inconsistent input files and configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace hbatk
