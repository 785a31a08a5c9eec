#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace hlift {

enum class ErrorCode {
  kInvalidArgument,
  kDegenerateOrientation,
  kCameraBelowGround,
  kOutOfRange,
  kIndexOutOfRange,
  kShapeMismatch,
  kHorizonRay,
  kAboveCamera,
  kNonPositiveDepth,
  kEmptyInput,
  kNoVisibleObjects,
  kInvalidGeometry,
  kExtentTooSmall,
  kConfig,
  kIo,
};

/// Stable identifier used in machine-readable error records.
std::string_view error_code_name(ErrorCode code);

/// True for codes caused by bad user input (configuration, files) rather
/// than by numeric failure inside the pipeline.
bool is_config_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace hlift
