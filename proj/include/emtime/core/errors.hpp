#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace emtime {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class ShapeError : public Error {
 public:
  using Error::Error;
};

class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

class ConvergenceError : public NumericalError {
 public:
  ConvergenceError(const std::string& what, std::vector<double> residuals)
      : NumericalError(what), residuals_(std::move(residuals)) {}
  explicit ConvergenceError(const std::string& what) : NumericalError(what) {}

  /// Last attained residual(s) / gradient norm(s).
  const std::vector<double>& residuals() const noexcept { return residuals_; }

 private:
  std::vector<double> residuals_;
};

class StabilityError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ForbiddenRegionError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Carries the coordinates at which a division or square root became singular.
class LocatedError : public NumericalError {
 public:
  LocatedError(const std::string& what, std::vector<double> where)
      : NumericalError(what), where_(std::move(where)) {}
  const std::vector<double>& where() const noexcept { return where_; }

 private:
  std::vector<double> where_;
};

class TurningPointError : public LocatedError {
 public:
  using LocatedError::LocatedError;
};

class NodeError : public LocatedError {
 public:
  using LocatedError::LocatedError;
};

class StationaryPointError : public LocatedError {
 public:
  using LocatedError::LocatedError;
};

class WindowError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string pointer, const std::string& what)
      : Error(pointer + ": " + what), pointer_(std::move(pointer)) {}
  /// JSON-pointer path of the offending entry.
  const std::string& pointer() const noexcept { return pointer_; }

 private:
  std::string pointer_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace emtime
