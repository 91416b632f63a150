#pragma once

#include <stdexcept>
#include <string>

namespace fockrad {

// Bad user input: config files, CSV schemas, out-of-domain parameters.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// The requested computation cannot be carried out to the stated precision.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Fock truncation would discard more probability mass than allowed.
class CutoffError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// Requested model is outside the underdamped (oscillating) regime.
class RegimeError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace fockrad
