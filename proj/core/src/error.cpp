#include "hlift/error.hpp"

namespace hlift {

std::string_view error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDegenerateOrientation: return "DegenerateOrientation";
    case ErrorCode::kCameraBelowGround: return "CameraBelowGround";
    case ErrorCode::kOutOfRange: return "OutOfRange";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kHorizonRay: return "HorizonRay";
    case ErrorCode::kAboveCamera: return "AboveCamera";
    case ErrorCode::kNonPositiveDepth: return "NonPositiveDepth";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNoVisibleObjects: return "NoVisibleObjects";
    case ErrorCode::kInvalidGeometry: return "InvalidGeometry";
    case ErrorCode::kExtentTooSmall: return "ExtentTooSmall";
    case ErrorCode::kConfig: return "ConfigError";
    case ErrorCode::kIo: return "IoError";
  }
  return "Unknown";
}

bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kConfig:
    case ErrorCode::kIo:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kDegenerateOrientation:
    case ErrorCode::kCameraBelowGround:
    case ErrorCode::kExtentTooSmall:
      return true;
    default:
      return false;
  }
}

}  // namespace hlift
