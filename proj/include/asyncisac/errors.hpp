#pragma once

#include <stdexcept>
#include <string>

namespace asyncisac {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (angle out of range, sigma2 <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or insufficient matrix/vector dimensions.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: singular systems, collapsed subspaces, degenerate bounds.
class NumericalError : public Error {
 public:
  using Error::Error;
};

class SingularityError : public NumericalError {
 public:
  SingularityError(const std::string& what, double smallest_eigenvalue)
      : NumericalError(what + " (smallest eigenvalue " + std::to_string(smallest_eigenvalue) + ")"),
        smallest_eigenvalue_(smallest_eigenvalue) {}

  double smallest_eigenvalue() const noexcept { return smallest_eigenvalue_; }

 private:
  double smallest_eigenvalue_;
};

/// h_s is (numerically) parallel to the steering vector, so Delta = 0 and the bounds diverge.
class CollinearityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Expected information is non-positive; the bound does not exist.
class DegenerateBoundError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class SubspaceError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// The nullspace projection of the CSI carries no static component.
class DegenerateProjectionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Error raised inside the estimation pipeline, tagged with the failing stage.
class EstimatorError : public NumericalError {
 public:
  EstimatorError(std::string stage, const std::string& what)
      : NumericalError("[" + stage + "] " + what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

/// Configuration file problems. `line` is 1-based, 0 when unknown.
class ConfigError : public Error {
 public:
  ConfigError(std::string field, int line, const std::string& what)
      : Error(format(field, line, what)), field_(std::move(field)), line_(line) {}

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  static std::string format(const std::string& field, int line, const std::string& what) {
    std::string msg = "config";
    if (line > 0) msg += ":" + std::to_string(line);
    if (!field.empty()) msg += ": field '" + field + "'";
    return msg + ": " + what;
  }

  std::string field_;
  int line_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace asyncisac
