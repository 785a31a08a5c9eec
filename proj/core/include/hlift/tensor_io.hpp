#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <vector>

#include "hlift/bevpool.hpp"
#include "hlift/lifting.hpp"
#include "hlift/scene.hpp"

namespace hlift {

/// Little-endian tensor blob:
///   bytes 0..3   magic "HLTB"
///   u32          format version (1)
///   u32          rank
///   u32 * rank   dims, outermost first
///   u64          element count (product of dims)
///   f32 * count  row-major payload
struct Tensor {
  std::vector<std::uint32_t> dims;
  std::vector<float> data;

  std::uint64_t element_count() const;
};

constexpr std::uint32_t kTensorFormatVersion = 1;

void write_tensor(std::ostream& out, const Tensor& t);
/// Throws Io on a malformed or truncated blob.
Tensor read_tensor(std::istream& in);
void write_tensor_file(const std::filesystem::path& path, const Tensor& t);
Tensor read_tensor_file(const std::filesystem::path& path);

/// [n_points, 4 + channels]: x, y, z, weight, features...
Tensor to_tensor(const WedgeCloud& cloud);
/// [ny, nx, channels]
Tensor to_tensor(const BevGrid& grid);
/// [2, height, width]: depth plane then height plane, NaN for sky.
Tensor to_tensor(const PixelMaps& maps);

}  // namespace hlift
