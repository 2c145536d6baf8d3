#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace dmatch {

enum class ErrorCode {
  kNonPositiveRate,
  kDimensionMismatch,
  kNonFiniteReward,
  kEmptySet,
  kTooManySources,
  kTooManyTypes,
  kTooLarge,
  kIterationOverflow,
  kNotSuitable,
  kDegenerateHorizon,
  kDuplicateTimes,
  kSolverFailure,
  kParseError,
  kInvalidArgument,
};

const char* to_string(ErrorCode code);

// Base exception for everything thrown by the library. The code identifies
// the failure class; what() carries the human-readable detail.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised by instance validation. Lists every violation found, not just the
// first one.
class ValidationError : public Error {
 public:
  struct Violation {
    ErrorCode code;
    std::string detail;
  };

  explicit ValidationError(std::vector<Violation> violations);

  const std::vector<Violation>& violations() const noexcept { return violations_; }
  bool has(ErrorCode code) const noexcept;

 private:
  std::vector<Violation> violations_;
};

}  // namespace dmatch
