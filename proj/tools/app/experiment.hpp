#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "hlift/bevpool.hpp"
#include "hlift/binning.hpp"
#include "hlift/geometry.hpp"
#include "hlift/robustness.hpp"
#include "hlift/scene.hpp"
#include "hlift/serialization.hpp"

namespace hlift::app {

enum class OutputFormat { kCsv, kJson, kBin };

std::string_view format_name(OutputFormat f);
OutputFormat parse_format(std::string_view name);

struct SceneSource {
  std::optional<std::filesystem::path> path;
  SceneTemplate templ = SceneTemplate::kCorridor;
  int n_boxes = 20;
};

struct LiftSettings {
  int pixel_stride = 16;
  int context_channels = 8;
  bool export_wedge = false;
};

struct RenderSettings {
  int stride = 16;
  int histogram_stride = 4;
  double depth_bin_width = 1.0;
  double height_bin_width = 0.05;
};

struct RobustnessSettings {
  int localization_trials = 20;
  int localization_stride = 4;
};

// Bench defaults to the operating point of the height/depth comparison:
// 90 height bins over [-1, 1] m against 206 depth bins over [1, 104] m.
struct BenchSettings {
  int warmup = 1;
  int iterations = 5;
  BinSpec height_bins = default_height_bins();
  BinSpec depth_bins = default_depth_bins();
};

/// Everything a command needs, resolved from the JSON config plus CLI
/// overrides. `effective` is the canonical document the hash is taken over.
struct ExperimentConfig {
  std::optional<std::filesystem::path> rig_path;
  std::optional<CameraRig> rig;
  SceneSource scene;
  BinSpec height_bins;
  BinSpec depth_bins;
  GridSpec grid;
  NoiseModel noise;
  DisturbanceSpec disturbance;
  RenderSettings render;
  LiftSettings lift;
  RobustnessSettings robustness;
  BenchSettings bench;
  std::uint64_t seed = 7;
  std::filesystem::path out_dir = "out";
  OutputFormat format = OutputFormat::kCsv;
  bool deterministic = true;

  json effective;

  const CameraRig& camera() const { return *rig; }
  std::string config_hash() const;
  std::string provenance() const;
};

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out_dir;
  std::optional<OutputFormat> format;
  std::optional<bool> deterministic;
};

/// Default rig: 1536x864 image, fx = fy = 1000, camera 5 m above the ground
/// looking along ego +x, pitched 10 degrees down.
CameraRig default_rig();

/// Height bins wide enough for every object class the generator emits.
BinSpec default_scene_height_bins();

/// Throws Config/Io on bad documents or missing referenced files. Relative
/// paths resolve against the config file's directory.
ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides = {});
ExperimentConfig config_from_json(const json& doc, const std::filesystem::path& base_dir,
                                  const Overrides& overrides = {});

Scene resolve_scene(const ExperimentConfig& cfg);

/// 64-bit FNV-1a over a byte string, hex encoded.
std::string fnv1a_hex(std::string_view bytes);

}  // namespace hlift::app
