#pragma once

#include <cstdint>
#include <random>

namespace hlift {

/// SplitMix64 finalizer; used to derive independent substream seeds.
std::uint64_t mix64(std::uint64_t x);

/// Seed of substream `stream` under master seed `seed`. Substream k is
/// reproducible without drawing from substreams 0..k-1.
std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t stream);

/// Portable generator: std::mt19937_64 is fully specified by the standard;
/// the distributions below are written out so draws match across standard
/// library implementations (std::normal_distribution is not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : engine_(substream_seed(seed, stream)) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);
  /// Box-Muller, one draw per call (the paired value is discarded).
  double normal(double mean = 0.0, double stddev = 1.0);

 private:
  std::mt19937_64 engine_;
};

}  // namespace hlift
