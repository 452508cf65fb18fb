#include "tsvqa/error.hpp"

namespace tsvqa {

std::string_view error_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kTruncatedStream: return "TruncatedStream";
    case ErrorCode::kOddDimensions: return "OddDimensions";
    case ErrorCode::kEmptySelection: return "EmptySelection";
    case ErrorCode::kPlaneTooSmall: return "PlaneTooSmall";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kCenteringMismatch: return "CenteringMismatch";
    case ErrorCode::kNegativeBase: return "NegativeBase";
    case ErrorCode::kFrameCountMismatch: return "FrameCountMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kConstantInput: return "ConstantInput";
    case ErrorCode::kEmptyManifest: return "EmptyManifest";
    case ErrorCode::kManifestFormat: return "ManifestFormat";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

}  // namespace tsvqa
