#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace dualarm {

enum class ErrorCode {
  kUnreachable,
  kSingular,
  kBehindCamera,
  kNonPositiveDepth,
  kEmptyLexicon,
  kNoMatch,
  kFrameMismatch,
  kBothUnreachable,
  kNoIKSolution,
  kNoDetection,
  kParseError,
  kValidationError,
  kInvalidArgument,
};

/// Stable identifier used in reports and wire payloads, e.g. "NoDetection".
std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace dualarm
