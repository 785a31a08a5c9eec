#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "hlift/binning.hpp"
#include "hlift/error.hpp"

namespace hlift {
namespace {

BinSpec did(int n, double lo, double hi, double alpha) { return {BinStrategy::kDynamicIncreasing, n, lo, hi, alpha}; }
BinSpec ud(int n, double lo, double hi) { return {BinStrategy::kUniform, n, lo, hi, 1.0}; }

std::vector<BinSpec> spec_matrix() {
  return {ud(90, -1, 1),        ud(2, 0, 1),
          did(90, -1, 1, 1.0),  did(90, -1, 1, 1.5),
          did(90, -1, 1, 2.0),  did(4, 0, 1, 2.0),
          did(30, -1, 4, 3.0),  {BinStrategy::kSpacingIncreasing, 90, -1, 1, 1},
          {BinStrategy::kSpacingIncreasing, 40, 0.5, 6, 1},  {BinStrategy::kLinearIncreasing, 90, -1, 1, 1},
          {BinStrategy::kLinearIncreasing, 7, 0, 3, 1},      default_depth_bins()};
}

// Edge list from the closed-form definitions, evaluated here independently.
std::vector<double> oracle_edges(const BinSpec& s) {
  std::vector<double> e;
  const double n = s.n_bins, span = s.range_max - s.range_min;
  for (int i = 0; i <= s.n_bins; ++i) {
    const double t = i / n;
    switch (s.strategy) {
      case BinStrategy::kUniform:
      case BinStrategy::kDepthUniform: e.push_back(s.range_min + span * t); break;
      case BinStrategy::kDynamicIncreasing: e.push_back(s.range_min + span * std::pow(t, s.alpha)); break;
      case BinStrategy::kSpacingIncreasing: {
        const double shift = 1.0 - s.range_min;
        const double lo = s.range_min + shift, hi = s.range_max + shift;
        e.push_back(std::exp(std::log(lo) + t * std::log(hi / lo)) - shift);
        break;
      }
      case BinStrategy::kLinearIncreasing: {
        // width(k) = w0 (1 + k), sum_{k<N} width(k) = span
        const double w0 = span / (n + n * (n - 1.0) / 2.0);
        double acc = s.range_min;
        for (int k = 0; k < i; ++k) acc += w0 * (1.0 + k);
        e.push_back(acc);
        break;
      }
    }
  }
  return e;
}

TEST(Binning, UniformEdges) {
  const auto e = bin_edges(ud(4, 0, 1));
  EXPECT_EQ(e, (std::vector<double>{0.0, 0.25, 0.5, 0.75, 1.0}));
}

TEST(Binning, DidAlphaOneIsUniform) {
  EXPECT_EQ(value_to_bin(0.55, did(10, 0, 1, 1.0)), 5);
  const auto a = bin_edges(did(90, -1, 1, 1.0));
  const auto b = bin_edges(ud(90, -1, 1));
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-12);
}

TEST(Binning, DidIndexAgainstEdgeScan) {
  const BinSpec s = did(90, -1, 1, 2.0);
  const double value = -0.5;
  const auto e = oracle_edges(s);
  int scanned = -1;
  for (int i = 0; i < s.n_bins; ++i) {
    if (e[i] <= value && value < e[i + 1]) scanned = i;
  }
  const int direct = static_cast<int>(std::floor(90.0 * std::pow((value + 1.0) / 2.0, 0.5)));
  EXPECT_EQ(scanned, direct);
  EXPECT_EQ(value_to_bin(value, s), scanned);
}

TEST(Binning, Representatives) {
  EXPECT_EQ(bin_values(ud(2, 0, 1)), (std::vector<double>{0.25, 0.75}));
  const auto e = bin_edges(did(4, 0, 1, 2.0));
  const std::vector<double> expected{0.0, 1.0 / 16, 0.25, 9.0 / 16, 1.0};
  for (std::size_t i = 0; i < e.size(); ++i) EXPECT_NEAR(e[i], expected[i], 1e-15);
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(bin_to_value(i, did(4, 0, 1, 2.0)), 0.5 * (expected[i] + expected[i + 1]), 1e-15);
}

TEST(Binning, OperatingSpecs) {
  const BinSpec h = default_height_bins();
  EXPECT_EQ(h.n_bins, 90);
  EXPECT_EQ(h.range_min, -1.0);
  EXPECT_EQ(h.range_max, 1.0);
  const BinSpec d = default_depth_bins();
  EXPECT_EQ(d.strategy, BinStrategy::kDepthUniform);
  EXPECT_EQ(d.n_bins, 206);
  EXPECT_EQ(bin_edges(d).back(), 104.0);
  EXPECT_EQ(bin_edges(d).front(), 1.0);
}

TEST(Binning, DidConcentratesNearMinimum) {
  double prev = 1e9;
  for (double alpha : {1.0, 1.5, 2.0}) {
    const auto e = bin_edges(did(90, -1, 1, alpha));
    EXPECT_LT(e[1] - e[0], prev);
    prev = e[1] - e[0];
  }
}

TEST(Binning, SidShiftsNegativeRange) {
  const BinSpec s{BinStrategy::kSpacingIncreasing, 90, -1, 1, 1};
  const auto e = bin_edges(s);
  EXPECT_EQ(e.front(), -1.0);
  EXPECT_EQ(e.back(), 1.0);
  for (std::size_t i = 1; i < e.size(); ++i) {
    EXPECT_GT(e[i], e[i - 1]);
    if (i > 1) {
      EXPECT_GT(e[i] - e[i - 1], e[i - 1] - e[i - 2]);  // widths grow
    }
  }
}

TEST(Binning, LidWidthsGrowLinearly) {
  const auto e = bin_edges({BinStrategy::kLinearIncreasing, 7, 0, 3, 1});
  const double w0 = e[1] - e[0];
  for (std::size_t i = 1; i + 1 < e.size(); ++i) EXPECT_NEAR(e[i + 1] - e[i], w0 * (1.0 + i), 1e-12);
}

TEST(Binning, EdgesMatchOracleForEveryStrategy) {
  for (const auto& s : spec_matrix()) {
    const auto e = bin_edges(s);
    const auto o = oracle_edges(s);
    ASSERT_EQ(e.size(), o.size());
    for (std::size_t i = 0; i < e.size(); ++i) EXPECT_NEAR(e[i], o[i], 1e-12) << strategy_name(s.strategy) << " i=" << i;
  }
}

TEST(Binning, PartitionBruteForceScan) {
  for (const auto& s : spec_matrix()) {
    if (s.range_max - s.range_min > 10.0) continue;  // depth spec is covered in acceptance
    const auto e = bin_edges(s);
    const long steps = std::lround((s.range_max - s.range_min) / 1e-4);
    int prev = 0;
    for (long k = 0; k < steps; ++k) {
      const double x = s.range_min + k * 1e-4;
      int hits = 0, which = -1;
      for (int i = 0; i < s.n_bins; ++i) {
        if (e[i] <= x && x < e[i + 1]) {
          ++hits;
          which = i;
        }
      }
      ASSERT_EQ(hits, 1) << strategy_name(s.strategy) << " x=" << x;
      const int got = value_to_bin(x, s);
      ASSERT_EQ(got, which) << strategy_name(s.strategy) << " x=" << x;
      ASSERT_GE(got, prev);
      prev = got;
    }
  }
}

TEST(Binning, RoundTripEveryBin) {
  for (const auto& s : spec_matrix()) {
    for (int i = 0; i < s.n_bins; ++i) EXPECT_EQ(value_to_bin(bin_to_value(i, s), s), i);
  }
}

TEST(Binning, UpperBoundaryClampsToLastBin) {
  for (const auto& s : spec_matrix()) EXPECT_EQ(value_to_bin(s.range_max, s), s.n_bins - 1);
  EXPECT_EQ(value_to_bin(-1.0, ud(90, -1, 1)), 0);
}

TEST(Binning, Errors) {
  try {
    value_to_bin(1.0001, ud(90, -1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kOutOfRange);
  }
  try {
    bin_to_value(90, ud(90, -1, 1));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIndexOutOfRange);
  }
  EXPECT_THROW(value_to_bin(std::nan(""), ud(4, 0, 1)), Error);
  EXPECT_THROW(bin_edges(ud(0, 0, 1)), Error);
  EXPECT_THROW(bin_edges(ud(4, 1, 1)), Error);
  EXPECT_THROW(bin_edges(did(4, 0, 1, 0.0)), Error);
  EXPECT_THROW(bin_edges({BinStrategy::kDepthUniform, 4, 0.0, 10.0, 1}), Error);
}

TEST(Binning, StrategyNames) {
  for (auto s : {BinStrategy::kUniform, BinStrategy::kSpacingIncreasing, BinStrategy::kLinearIncreasing,
                 BinStrategy::kDynamicIncreasing, BinStrategy::kDepthUniform}) {
    EXPECT_EQ(parse_strategy(strategy_name(s)), s);
  }
  EXPECT_THROW(parse_strategy("XYZ"), Error);
}

}  // namespace
}  // namespace hlift
