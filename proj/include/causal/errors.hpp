#pragma once

#include <stdexcept>
#include <string>

namespace causal {

// Invalid parameters, malformed config files, incompatible inputs.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// File could not be opened, read, or written, or its contents are corrupt.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of a mathematical map.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Frame or index that does not fit the detector's synapse layout.
class StructuralError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// R is undefined when there are no target periods.
class UndefinedMetricError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Calibration input cannot produce distinct bin boundaries.
class CalibrationError : public ConfigError {
 public:
  using ConfigError::ConfigError;
};

}  // namespace causal
