#pragma once

#include <stdexcept>
#include <string>

namespace hardy {

// Error taxonomy shared by the whole library. Each condition the public
// operations can signal maps to one code; the C API translates codes to
// integer statuses.
enum class ErrorCode {
  NonPositiveArgument,
  NotMonotone,
  MonotonicityViolated,
  ToleranceNotReached,
  WindowTooSmall,
  RegimeMismatch,
  ThetaOutOfRange,
  DegenerateWeight,
  EmptyDecomposition,
  ZeroFunction,
  IndeterminateRatio,
  PreconditionViolated,
  ConfigError,
  Internal,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::NonPositiveArgument: return "NonPositiveArgument";
    case ErrorCode::NotMonotone: return "NotMonotone";
    case ErrorCode::MonotonicityViolated: return "MonotonicityViolated";
    case ErrorCode::ToleranceNotReached: return "ToleranceNotReached";
    case ErrorCode::WindowTooSmall: return "WindowTooSmall";
    case ErrorCode::RegimeMismatch: return "RegimeMismatch";
    case ErrorCode::ThetaOutOfRange: return "ThetaOutOfRange";
    case ErrorCode::DegenerateWeight: return "DegenerateWeight";
    case ErrorCode::EmptyDecomposition: return "EmptyDecomposition";
    case ErrorCode::ZeroFunction: return "ZeroFunction";
    case ErrorCode::IndeterminateRatio: return "IndeterminateRatio";
    case ErrorCode::PreconditionViolated: return "PreconditionViolated";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Unknown";
}

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(error_code_name(code)) + ": " + what);
}

}  // namespace hardy
