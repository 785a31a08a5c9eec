#pragma once

#include <cstddef>
#include <string>

#include "app/experiment.hpp"

namespace hlift::app {

struct RenderRun {
  double depth_spread = 0.0;
  double height_spread = 0.0;
  std::size_t surface_pixels = 0;
};

struct PathCounts {
  std::size_t points = 0;
  std::size_t masked_cells = 0;
  std::size_t horizon_skipped_cells = 0;
  std::size_t dropped = 0;
  std::string grid_checksum;
};

struct LiftRun {
  PathCounts height;
  PathCounts depth;
};

struct RobustnessRun {
  OverlapReport overlap;
  ErrorReport clean;
  ErrorReport disturbed;
};

struct BenchRun {
  PathCounts height;
  PathCounts depth;
  double height_ms = 0.0;  // median lift+pool wall time
  double depth_ms = 0.0;
  double ratio() const { return height_ms / depth_ms; }
};

// Each command writes its artifacts under cfg.out_dir (created if needed).
RenderRun cmd_render(const ExperimentConfig& cfg);
LiftRun cmd_lift(const ExperimentConfig& cfg);
RobustnessRun cmd_robustness(const ExperimentConfig& cfg);
BenchRun cmd_bench(const ExperimentConfig& cfg);

/// Hash over the raw bytes of the pooled grid values and hit counts.
std::string grid_checksum(const BevGrid& grid);

/// Deterministic context map: channel 0 is 1 everywhere, the rest are
/// uniform draws from a per-cell substream of `seed`.
ContextMap synthetic_context(int width, int height, int channels, std::uint64_t seed);

}  // namespace hlift::app
