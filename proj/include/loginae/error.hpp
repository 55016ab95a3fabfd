// SPDX-License-Identifier: Apache-2.0

#ifndef LOGINAE_ERROR_HPP
#define LOGINAE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace loginae {

enum class ErrorCode {
  kArgument,
  kParse,
  kRecordRejected,
  kModelIncompatible,
  kTrainingDiverged,
  kUndefinedMetric,
  kDegenerateValidation,
  kWorkflow,
  kNotFound,
  kIntegrity,
  kIo,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kArgument: return "argument";
    case ErrorCode::kParse: return "parse";
    case ErrorCode::kRecordRejected: return "record_rejected";
    case ErrorCode::kModelIncompatible: return "model_incompatible";
    case ErrorCode::kTrainingDiverged: return "training_diverged";
    case ErrorCode::kUndefinedMetric: return "undefined_metric";
    case ErrorCode::kDegenerateValidation: return "degenerate_validation";
    case ErrorCode::kWorkflow: return "workflow";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kIntegrity: return "integrity";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-readable code so the
/// CLI can report it as JSON.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

inline void require(bool condition, const std::string& message) {
  if (!condition) fail(ErrorCode::kArgument, message);
}

}  // namespace loginae

#endif  // LOGINAE_ERROR_HPP
