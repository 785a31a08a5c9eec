#include "hlift/tensor_io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "hlift/error.hpp"

namespace hlift {

namespace {

constexpr std::array<char, 4> kMagic{'H', 'L', 'T', 'B'};

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(std::is_unsigned_v<T>);
  std::array<char, sizeof(T)> bytes;
  for (std::size_t i = 0; i < sizeof(T); ++i) bytes[i] = static_cast<char>((value >> (8 * i)) & 0xffu);
  out.write(bytes.data(), bytes.size());
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, sizeof(T)> bytes;
  in.read(reinterpret_cast<char*>(bytes.data()), bytes.size());
  if (!in) throw Error(ErrorCode::kIo, "tensor: truncated header");
  T value = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) value |= static_cast<T>(bytes[i]) << (8 * i);
  return value;
}

}  // namespace

std::uint64_t Tensor::element_count() const {
  std::uint64_t n = 1;
  for (auto d : dims) n *= d;
  return n;
}

void write_tensor(std::ostream& out, const Tensor& t) {
  if (t.element_count() != t.data.size()) {
    throw Error(ErrorCode::kShapeMismatch, "tensor: payload size does not match dims");
  }
  out.write(kMagic.data(), kMagic.size());
  put_le<std::uint32_t>(out, kTensorFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(t.dims.size()));
  for (auto d : t.dims) put_le<std::uint32_t>(out, d);
  put_le<std::uint64_t>(out, t.element_count());
  for (float f : t.data) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(f));
  if (!out) throw Error(ErrorCode::kIo, "tensor: write failed");
}

Tensor read_tensor(std::istream& in) {
  std::array<char, 4> magic{};
  in.read(magic.data(), magic.size());
  if (!in || magic != kMagic) throw Error(ErrorCode::kIo, "tensor: bad magic");
  const auto version = get_le<std::uint32_t>(in);
  if (version != kTensorFormatVersion) throw Error(ErrorCode::kIo, "tensor: unsupported version");
  const auto rank = get_le<std::uint32_t>(in);
  if (rank > 16) throw Error(ErrorCode::kIo, "tensor: implausible rank");
  Tensor t;
  t.dims.resize(rank);
  for (auto& d : t.dims) d = get_le<std::uint32_t>(in);
  const auto count = get_le<std::uint64_t>(in);
  if (count != t.element_count()) throw Error(ErrorCode::kIo, "tensor: element count disagrees with dims");
  t.data.resize(count);
  for (auto& f : t.data) f = std::bit_cast<float>(get_le<std::uint32_t>(in));
  return t;
}

void write_tensor_file(const std::filesystem::path& path, const Tensor& t) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  write_tensor(out, t);
}

Tensor read_tensor_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  return read_tensor(in);
}

Tensor to_tensor(const WedgeCloud& cloud) {
  Tensor t;
  const auto cols = static_cast<std::uint32_t>(4 + cloud.channels);
  t.dims = {static_cast<std::uint32_t>(cloud.size()), cols};
  t.data.reserve(cloud.size() * cols);
  for (std::size_t p = 0; p < cloud.size(); ++p) {
    const Vec3& q = cloud.positions[p];
    t.data.push_back(static_cast<float>(q.x()));
    t.data.push_back(static_cast<float>(q.y()));
    t.data.push_back(static_cast<float>(q.z()));
    t.data.push_back(static_cast<float>(cloud.weights[p]));
    for (double f : cloud.feature(p)) t.data.push_back(static_cast<float>(f));
  }
  return t;
}

Tensor to_tensor(const BevGrid& grid) {
  Tensor t;
  t.dims = {static_cast<std::uint32_t>(grid.ny), static_cast<std::uint32_t>(grid.nx),
            static_cast<std::uint32_t>(grid.spec.channels)};
  t.data.reserve(grid.data.size());
  for (double x : grid.data) t.data.push_back(static_cast<float>(x));
  return t;
}

Tensor to_tensor(const PixelMaps& maps) {
  Tensor t;
  t.dims = {2u, static_cast<std::uint32_t>(maps.height), static_cast<std::uint32_t>(maps.width)};
  t.data.reserve(2 * maps.size());
  for (double x : maps.depth) t.data.push_back(static_cast<float>(x));
  for (double x : maps.height_above_ground) t.data.push_back(static_cast<float>(x));
  return t;
}

}  // namespace hlift
