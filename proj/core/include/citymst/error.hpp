#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace citymst {

enum class ErrorCode {
  kInvalidArgument,
  kNonIntegerGrid,
  kDuplicateCity,
  kOutOfGrid,
  kNotWellConnected,
  kRejectionStall,
  kStrayPoint,
  kDuplicatePoint,
  kTooLarge,
  kTooFew,
  kIndexOutOfRange,
  kOutsideRect,
  kEmptyB,
  kEmptyBatch,
  kHypothesisViolated,
  kAssertionFailure,
  kParseError,
  kValidationError,
  kUnknownExperiment,
  kIoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// callers (and the CLI exit-status mapping) can branch on the kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace citymst
