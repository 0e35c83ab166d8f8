#include "citymst/error.hpp"

namespace citymst {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kNonIntegerGrid: return "NonIntegerGrid";
    case ErrorCode::kDuplicateCity: return "DuplicateCity";
    case ErrorCode::kOutOfGrid: return "OutOfGrid";
    case ErrorCode::kNotWellConnected: return "NotWellConnected";
    case ErrorCode::kRejectionStall: return "RejectionStall";
    case ErrorCode::kStrayPoint: return "StrayPoint";
    case ErrorCode::kDuplicatePoint: return "DuplicatePoint";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kTooFew: return "TooFew";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kOutsideRect: return "OutsideRect";
    case ErrorCode::kEmptyB: return "EmptyB";
    case ErrorCode::kEmptyBatch: return "EmptyBatch";
    case ErrorCode::kHypothesisViolated: return "HypothesisViolated";
    case ErrorCode::kAssertionFailure: return "AssertionFailure";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kValidationError: return "ValidationError";
    case ErrorCode::kUnknownExperiment: return "UnknownExperiment";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace citymst
