#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace s3pose {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Numerical failures. The CLI maps all of these to exit code 4.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class NearZeroNorm : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateMean : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateAxis : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ParallelInput : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NoPlaneRetained : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class EmptyPlaneSet : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonFiniteObjective : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class DegenerateCovariance : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Malformed benchmark configuration. Carries the offending line (0 when the
/// problem is not tied to a line) and field name.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& message, int line = 0, std::string field = {})
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + message
                       : message),
        line_(line),
        field_(std::move(field)) {}

  int line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  int line_;
  std::string field_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace s3pose
