#pragma once

#include <stdexcept>
#include <string>

namespace qent {

// Error taxonomy. The CLI maps each family onto an exit code.

/// Index or dimension outside the valid range.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Input object violates a type invariant (normalization, hermiticity, ...).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Inconsistent or unsupported configuration.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failure: eigensolver, step-size underflow, bracket without root.
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A propagated state drifted out of the physical set beyond tolerance.
class IntegrityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qent
