#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace tsvqa {

// Every failure the library reports carries one of these codes. The CLI maps
// each code onto its own exit status, so new codes must be appended, never
// reordered.
enum class ErrorCode {
  kInvalidArgument = 1,
  kIoError,
  kTruncatedStream,
  kOddDimensions,
  kEmptySelection,
  kPlaneTooSmall,
  kDimensionMismatch,
  kCenteringMismatch,
  kNegativeBase,
  kFrameCountMismatch,
  kLengthMismatch,
  kConstantInput,
  kEmptyManifest,
  kManifestFormat,
};

std::string_view error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace tsvqa
