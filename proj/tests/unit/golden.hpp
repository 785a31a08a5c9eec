#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

#include "hlift/serialization.hpp"

namespace hlift::test {

// Golden files live in tests/data/golden. Set HLIFT_UPDATE_GOLDEN=1 to
// rewrite them from the current build; otherwise they are only read.
inline json golden(const std::string& name, const json& actual) {
  const std::filesystem::path path = std::filesystem::path(HLIFT_GOLDEN_DIR) / name;
  if (std::getenv("HLIFT_UPDATE_GOLDEN") != nullptr) {
    write_json_file(path, actual);
    return actual;
  }
  return read_json_file(path);
}

}  // namespace hlift::test
