#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace springcurl {

enum class ErrorCode {
  InvalidInput,
  NoSolution,
  ProtocolViolation,
  ShotTimeout,
  MetricUnavailable,
  ModelSpec,
  InvalidComparison,
  SchemaMismatch,
  TruncatedLog,
  Io,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidInput: return "invalid-input";
    case ErrorCode::NoSolution: return "no-solution";
    case ErrorCode::ProtocolViolation: return "protocol-violation";
    case ErrorCode::ShotTimeout: return "shot-timeout";
    case ErrorCode::MetricUnavailable: return "metric-unavailable";
    case ErrorCode::ModelSpec: return "model-spec";
    case ErrorCode::InvalidComparison: return "invalid-comparison";
    case ErrorCode::SchemaMismatch: return "schema-mismatch";
    case ErrorCode::TruncatedLog: return "truncated-log";
    case ErrorCode::Io: return "io";
  }
  return "unknown";
}

/// Single exception type for the library; callers branch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace springcurl
