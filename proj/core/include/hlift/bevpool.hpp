#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hlift/lifting.hpp"

namespace hlift {

/// Ego-frame XY extent of the BEV grid. Cells are half-open [lo, lo + res).
struct GridSpec {
  double x_min = 0.0;
  double x_max = 102.4;
  double y_min = -51.2;
  double y_max = 51.2;
  double res_x = 0.8;
  double res_y = 0.8;
  int channels = 1;

  void validate() const;
  int nx() const;
  int ny() const;
  std::size_t cell_count() const { return static_cast<std::size_t>(nx()) * ny(); }
};

struct CellIndex {
  int ix = 0;
  int iy = 0;
  friend bool operator==(const CellIndex&, const CellIndex&) = default;
};

/// Floor binning; empty when (x, y) falls outside the half-open extent.
std::optional<CellIndex> grid_cell_of(double x, double y, const GridSpec& spec);

struct BevGrid {
  GridSpec spec;
  int nx = 0;
  int ny = 0;
  std::vector<double> data;             // [iy][ix][channel]
  std::vector<std::uint32_t> hit_count;  // [iy][ix]
  std::size_t dropped = 0;               // points outside the extent

  std::span<const double> cell(int ix, int iy) const {
    const std::size_t m = static_cast<std::size_t>(iy) * nx + ix;
    return {data.data() + m * spec.channels, static_cast<std::size_t>(spec.channels)};
  }
};

enum class PoolMode {
  /// Single pass in cloud order; bit-identical across runs.
  kFixedOrder,
  /// Points bucketed by destination cell, buckets reduced on worker threads.
  /// Each bucket keeps cloud order, so results equal kFixedOrder bit for bit.
  kParallel,
  /// Contributions per cell sorted by a canonical key before summation; the
  /// result is bit-identical for any permutation of the input cloud.
  kCanonical,
};

/// Sum-pools weight * feature of every in-extent point into its XY cell.
/// spec.channels must equal cloud.channels.
BevGrid pool(const WedgeCloud& cloud, const GridSpec& spec, PoolMode mode = PoolMode::kFixedOrder,
             unsigned threads = 0);

}  // namespace hlift
