#include "dualarm/error.hpp"

namespace dualarm {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnreachable: return "Unreachable";
    case ErrorCode::kSingular: return "Singular";
    case ErrorCode::kBehindCamera: return "BehindCamera";
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kEmptyLexicon: return "EmptyLexicon";
    case ErrorCode::kNoMatch: return "NoMatch";
    case ErrorCode::kFrameMismatch: return "FrameMismatch";
    case ErrorCode::kBothUnreachable: return "BothUnreachable";
    case ErrorCode::kNoIKSolution: return "NoIKSolution";
    case ErrorCode::kNoDetection: return "NoDetection";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
  }
  return "Unknown";
}

}  // namespace dualarm
