#pragma once

#include <stdexcept>
#include <string>

namespace gravphase {

// Exit-code buckets used by the CLI: 2 validation, 3 convergence,
// 4 internal consistency.
enum class ErrorCode : int {
    validation = 2,
    convergence = 3,
    consistency = 4,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(what), code_(code) {}
    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

class ValidationError : public Error {
  public:
    explicit ValidationError(const std::string& what)
        : Error(ErrorCode::validation, what) {}
};

class ConfigError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

class NumericError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

class GeometryError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

class SingularityError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

class ProximityError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

class RankError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

class ScenarioError : public ValidationError {
  public:
    using ValidationError::ValidationError;
};

// Carries the last two estimates of a refinement loop that failed to settle.
class ConvergenceError : public Error {
  public:
    ConvergenceError(const std::string& what, double previous, double last)
        : Error(ErrorCode::convergence, what),
          previous_estimate(previous),
          last_estimate(last) {}

    double previous_estimate;
    double last_estimate;
};

class AccuracyError : public ConvergenceError {
  public:
    using ConvergenceError::ConvergenceError;
};

class ConsistencyError : public Error {
  public:
    explicit ConsistencyError(const std::string& what)
        : Error(ErrorCode::consistency, what) {}
};

}  // namespace gravphase
