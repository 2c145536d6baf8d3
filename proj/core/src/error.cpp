#include "dmatch/error.hpp"

#include <algorithm>

namespace dmatch {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonPositiveRate: return "NonPositiveRate";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kNonFiniteReward: return "NonFiniteReward";
    case ErrorCode::kEmptySet: return "EmptySet";
    case ErrorCode::kTooManySources: return "TooManySources";
    case ErrorCode::kTooManyTypes: return "TooManyTypes";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kIterationOverflow: return "IterationOverflow";
    case ErrorCode::kNotSuitable: return "NotSuitable";
    case ErrorCode::kDegenerateHorizon: return "DegenerateHorizon";
    case ErrorCode::kDuplicateTimes: return "DuplicateTimes";
    case ErrorCode::kSolverFailure: return "SolverFailure";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

namespace {

std::string join(const std::vector<ValidationError::Violation>& violations) {
  std::string out = "invalid instance:";
  for (const auto& v : violations) {
    out += "\n  ";
    out += to_string(v.code);
    out += ": ";
    out += v.detail;
  }
  return out;
}

}  // namespace

ValidationError::ValidationError(std::vector<Violation> violations)
    : Error(violations.empty() ? ErrorCode::kInvalidArgument : violations.front().code,
            join(violations)),
      violations_(std::move(violations)) {}

bool ValidationError::has(ErrorCode code) const noexcept {
  return std::any_of(violations_.begin(), violations_.end(),
                     [code](const Violation& v) { return v.code == code; });
}

}  // namespace dmatch
