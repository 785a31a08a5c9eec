#include "hlift/binning.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "hlift/error.hpp"

namespace hlift {

std::string_view strategy_name(BinStrategy s) {
  switch (s) {
    case BinStrategy::kUniform: return "UD";
    case BinStrategy::kSpacingIncreasing: return "SID";
    case BinStrategy::kLinearIncreasing: return "LID";
    case BinStrategy::kDynamicIncreasing: return "DID";
    case BinStrategy::kDepthUniform: return "DEPTH_UD";
  }
  return "UD";
}

BinStrategy parse_strategy(std::string_view name) {
  if (name == "UD") return BinStrategy::kUniform;
  if (name == "SID") return BinStrategy::kSpacingIncreasing;
  if (name == "LID") return BinStrategy::kLinearIncreasing;
  if (name == "DID") return BinStrategy::kDynamicIncreasing;
  if (name == "DEPTH_UD") return BinStrategy::kDepthUniform;
  throw Error(ErrorCode::kConfig, "unknown bin strategy '" + std::string(name) + "'");
}

BinSpec default_height_bins() { return {BinStrategy::kUniform, 90, -1.0, 1.0, 1.0}; }
BinSpec default_depth_bins() { return {BinStrategy::kDepthUniform, 206, 1.0, 104.0, 1.0}; }

namespace {

// SID works on a shifted domain starting at 1 so the logarithm stays defined
// for ranges that include zero or negative heights.
double sid_shift(const BinSpec& s) { return 1.0 - s.range_min; }

double edge_at(const BinSpec& s, int i) {
  if (i <= 0) return s.range_min;
  if (i >= s.n_bins) return s.range_max;
  const double span = s.range_max - s.range_min;
  const double n = s.n_bins;
  switch (s.strategy) {
    case BinStrategy::kUniform:
    case BinStrategy::kDepthUniform:
      return s.range_min + span * (i / n);
    case BinStrategy::kDynamicIncreasing:
      return s.range_min + span * std::pow(i / n, s.alpha);
    case BinStrategy::kSpacingIncreasing: {
      const double shift = sid_shift(s);
      const double d_hi = s.range_max + shift;  // d_lo == 1
      return std::exp((i / n) * std::log(d_hi)) - shift;
    }
    case BinStrategy::kLinearIncreasing:
      // width(i) = w0 * (1 + i), w0 = 2 * span / (N (N + 1))
      return s.range_min + span * (static_cast<double>(i) * (i + 1)) / (n * (n + 1));
  }
  return s.range_min;
}

int closed_form_index(double value, const BinSpec& s) {
  const double span = s.range_max - s.range_min;
  const double t = (value - s.range_min) / span;
  const double n = s.n_bins;
  double idx = 0.0;
  switch (s.strategy) {
    case BinStrategy::kUniform:
    case BinStrategy::kDepthUniform:
      idx = std::floor(n * t);
      break;
    case BinStrategy::kDynamicIncreasing:
      idx = std::floor(n * std::pow(t, 1.0 / s.alpha));
      break;
    case BinStrategy::kSpacingIncreasing: {
      const double shift = sid_shift(s);
      idx = std::floor(n * std::log(value + shift) / std::log(s.range_max + shift));
      break;
    }
    case BinStrategy::kLinearIncreasing: {
      const double x = t * n * (n + 1.0);
      idx = std::floor((-1.0 + std::sqrt(1.0 + 4.0 * x)) / 2.0);
      break;
    }
  }
  if (idx < 0.0) return 0;
  if (idx > n - 1.0) return s.n_bins - 1;
  return static_cast<int>(idx);
}

}  // namespace

void BinSpec::validate() const {
  if (n_bins < 1) {
    throw Error(ErrorCode::kInvalidArgument, "bin spec: n_bins must be >= 1");
  }
  if (!std::isfinite(range_min) || !std::isfinite(range_max) || !(range_min < range_max)) {
    throw Error(ErrorCode::kInvalidArgument, "bin spec: need finite range_min < range_max");
  }
  if (strategy == BinStrategy::kDynamicIncreasing && !(alpha > 0.0 && std::isfinite(alpha))) {
    throw Error(ErrorCode::kInvalidArgument, "bin spec: alpha must be > 0 for DID");
  }
  if (strategy == BinStrategy::kDepthUniform && !(range_min > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "bin spec: depth range must be positive");
  }
  double prev = edge_at(*this, 0);
  for (int i = 1; i <= n_bins; ++i) {
    const double e = edge_at(*this, i);
    if (!(e > prev)) {
      std::ostringstream msg;
      msg << "bin spec: edges not strictly increasing at index " << i
          << " (too many bins or alpha too large for double precision)";
      throw Error(ErrorCode::kInvalidArgument, msg.str());
    }
    prev = e;
  }
}

std::vector<double> bin_edges(const BinSpec& spec) {
  spec.validate();
  std::vector<double> edges(static_cast<std::size_t>(spec.n_bins) + 1);
  for (int i = 0; i <= spec.n_bins; ++i) edges[static_cast<std::size_t>(i)] = edge_at(spec, i);
  return edges;
}

int value_to_bin(double value, const BinSpec& spec) {
  if (!(value >= spec.range_min && value <= spec.range_max)) {
    std::ostringstream msg;
    msg << "value " << value << " outside bin range [" << spec.range_min << ", "
        << spec.range_max << "]";
    throw Error(ErrorCode::kOutOfRange, msg.str());
  }
  int i = closed_form_index(value, spec);
  // The closed form can be off by one right at an edge; settle it against
  // the edge list so bins tile the range exactly.
  while (i > 0 && value < edge_at(spec, i)) --i;
  while (i < spec.n_bins - 1 && value >= edge_at(spec, i + 1)) ++i;
  return i;
}

double bin_to_value(int index, const BinSpec& spec) {
  if (index < 0 || index >= spec.n_bins) {
    std::ostringstream msg;
    msg << "bin index " << index << " outside [0, " << spec.n_bins << ")";
    throw Error(ErrorCode::kIndexOutOfRange, msg.str());
  }
  return 0.5 * (edge_at(spec, index) + edge_at(spec, index + 1));
}

std::vector<double> bin_values(const BinSpec& spec) {
  const auto edges = bin_edges(spec);
  std::vector<double> values(static_cast<std::size_t>(spec.n_bins));
  for (std::size_t i = 0; i < values.size(); ++i) values[i] = 0.5 * (edges[i] + edges[i + 1]);
  return values;
}

}  // namespace hlift
