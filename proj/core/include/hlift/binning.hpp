#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

namespace hlift {

/// Discretization strategies for height (and the depth baseline).
///  - kUniform:            equal widths
///  - kSpacingIncreasing:  log-spaced edges (SID)
///  - kLinearIncreasing:   widths grow linearly with bin index (LID)
///  - kDynamicIncreasing:  edge(i) = lo + (hi - lo) * (i / N)^alpha (DID)
///  - kDepthUniform:       uniform bins over a depth range
enum class BinStrategy { kUniform, kSpacingIncreasing, kLinearIncreasing, kDynamicIncreasing, kDepthUniform };

std::string_view strategy_name(BinStrategy s);
/// Accepts "UD", "SID", "LID", "DID", "DEPTH_UD". Throws Config on anything else.
BinStrategy parse_strategy(std::string_view name);

struct BinSpec {
  BinStrategy strategy = BinStrategy::kUniform;
  int n_bins = 1;
  double range_min = 0.0;
  double range_max = 1.0;
  double alpha = 1.0;  // only read for kDynamicIncreasing

  void validate() const;
  bool is_height() const { return strategy != BinStrategy::kDepthUniform; }
};

/// Operating points used throughout the tools: 90 height bins over [-1, 1] m
/// and 206 depth bins over [1, 104] m.
BinSpec default_height_bins();
BinSpec default_depth_bins();

/// n_bins + 1 strictly increasing edges, first == range_min, last == range_max.
std::vector<double> bin_edges(const BinSpec& spec);

/// Closed-form bin index of a value. The value range_max lands in the last
/// bin. Throws OutOfRange outside [range_min, range_max].
int value_to_bin(double value, const BinSpec& spec);

/// Midpoint of bin `index`. Throws IndexOutOfRange.
double bin_to_value(int index, const BinSpec& spec);

/// All representatives at once, in bin order.
std::vector<double> bin_values(const BinSpec& spec);

}  // namespace hlift
