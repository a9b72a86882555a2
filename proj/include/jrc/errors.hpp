#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace jrc {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad configuration values. Carries every offending field so callers can
/// report them all at once.
class ConfigError : public Error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  explicit ConfigError(const std::string& problem) : ConfigError(std::vector<std::string>{problem}) {}

  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Argument outside the mathematical domain of an operation (d <= 0, empty input, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Coincident points, parallel bearings, singular intersection configurations.
class DegenerateGeometryError : public Error {
 public:
  using Error::Error;
};

/// Numerical breakdown: non-PSD covariance, singular solve, quadrature that does not settle.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Caller broke a documented precondition (e.g. combiner requested for an unserved UE).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// Association constraints cannot be met.
class InfeasibleError : public Error {
 public:
  using Error::Error;
};

/// Exhaustive search space above the configured cap.
class TooLargeError : public Error {
 public:
  using Error::Error;
};

/// Sensing refinement could not keep two clutter-free APs for some UEs.
class UnsatisfiableLosError : public Error {
 public:
  UnsatisfiableLosError(std::vector<std::size_t> ues, const std::string& what);
  const std::vector<std::size_t>& ues() const noexcept { return ues_; }

 private:
  std::vector<std::size_t> ues_;
};

}  // namespace jrc
