#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace patent_rent {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad input: arguments, documents or configuration the caller can fix.
class InputError : public Error {
 public:
  using Error::Error;
};

/// The model or the numerics could not produce a result for valid-looking input.
class ComputationError : public Error {
 public:
  using Error::Error;
};

class DomainError : public InputError {
 public:
  using InputError::InputError;
};

class ConfigurationError : public InputError {
 public:
  using InputError::InputError;
};

class ReportingError : public InputError {
 public:
  using InputError::InputError;
};

/// Collects every violation found while validating a document.
class ValidationError : public InputError {
 public:
  explicit ValidationError(std::vector<std::string> violations);
  ValidationError(const std::string& context, std::vector<std::string> violations);

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  std::vector<std::string> violations_;
};

class ModelValidityError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class SamplingError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class DegenerateDataError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

class EnsembleError : public ComputationError {
 public:
  using ComputationError::ComputationError;
};

}  // namespace patent_rent
