#include "app/experiment.hpp"

#include <cstdio>

#include "hlift/error.hpp"

namespace hlift::app {

std::string_view format_name(OutputFormat f) {
  switch (f) {
    case OutputFormat::kCsv: return "csv";
    case OutputFormat::kJson: return "json";
    case OutputFormat::kBin: return "bin";
  }
  return "csv";
}

OutputFormat parse_format(std::string_view name) {
  if (name == "csv") return OutputFormat::kCsv;
  if (name == "json") return OutputFormat::kJson;
  if (name == "bin") return OutputFormat::kBin;
  throw Error(ErrorCode::kConfig, "unknown output format '" + std::string(name) + "'");
}

CameraRig default_rig() {
  Intrinsics k{1000.0, 1000.0, 768.0, 432.0, 1536, 864};
  CameraPose pose;
  pose.position = Vec3(0.0, 0.0, 5.0);
  pose.pitch_down = deg_to_rad(10.0);
  return CameraRig(k, extrinsics_from_pose(pose), "default");
}

BinSpec default_scene_height_bins() { return {BinStrategy::kUniform, 90, -1.0, 4.0, 1.0}; }

std::string fnv1a_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string ExperimentConfig::config_hash() const { return fnv1a_hex(effective.dump()); }

std::string ExperimentConfig::provenance() const {
  return "config_hash=" + config_hash() + " seed=" + std::to_string(seed);
}

namespace {

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  std::filesystem::path path(p);
  if (path.is_relative()) path = base / path;
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kConfig, "referenced file does not exist: " + path.string());
  }
  return path;
}

template <typename T>
T section(const json& doc, const char* key, T fallback) {
  if (!doc.contains(key)) return fallback;
  return parse_json<T>(doc.at(key), key);
}

int positive_int(const json& j, const char* key, int fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number_integer() || j.at(key).get<long long>() < 1) {
    throw Error(ErrorCode::kConfig, std::string(key) + " must be a positive integer");
  }
  return j.at(key).get<int>();
}

double positive_double(const json& j, const char* key, double fallback) {
  if (!j.contains(key)) return fallback;
  if (!j.at(key).is_number() || !(j.at(key).get<double>() > 0.0)) {
    throw Error(ErrorCode::kConfig, std::string(key) + " must be a positive number");
  }
  return j.at(key).get<double>();
}

}  // namespace

ExperimentConfig config_from_json(const json& doc, const std::filesystem::path& base_dir,
                                  const Overrides& overrides) {
  if (!doc.is_object()) throw Error(ErrorCode::kConfig, "config must be a JSON object");
  ExperimentConfig cfg;
  try {
    cfg.seed = doc.value("seed", std::uint64_t{7});
    if (doc.contains("out")) cfg.out_dir = base_dir / doc.at("out").get<std::string>();
    if (doc.contains("format")) cfg.format = parse_format(doc.at("format").get<std::string>());
    cfg.deterministic = doc.value("deterministic", true);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("config: ") + e.what());
  }
  if (overrides.seed) cfg.seed = *overrides.seed;
  if (overrides.out_dir) cfg.out_dir = *overrides.out_dir;
  if (overrides.format) cfg.format = *overrides.format;
  if (overrides.deterministic) cfg.deterministic = *overrides.deterministic;

  json rig_doc;
  if (!doc.contains("rig")) {
    cfg.rig = default_rig();
    rig_doc = rig_to_json(*cfg.rig);
  } else if (doc.at("rig").is_string()) {
    cfg.rig_path = resolve(base_dir, doc.at("rig").get<std::string>());
    rig_doc = read_json_file(*cfg.rig_path);
    cfg.rig = rig_from_json(rig_doc);
  } else {
    rig_doc = doc.at("rig");
    cfg.rig = rig_from_json(rig_doc);
  }

  json scene_doc = doc.value("scene", json::object());
  try {
    if (scene_doc.contains("path")) {
      cfg.scene.path = resolve(base_dir, scene_doc.at("path").get<std::string>());
    } else {
      cfg.scene.templ = parse_template(scene_doc.value("template", std::string("corridor")));
      cfg.scene.n_boxes = scene_doc.value("n_boxes", 20);
      if (cfg.scene.n_boxes < 0) throw Error(ErrorCode::kConfig, "scene.n_boxes must be >= 0");
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kConfig, std::string("scene: ") + e.what());
  }

  cfg.height_bins = section(doc, "height_bins", default_scene_height_bins());
  cfg.depth_bins = section(doc, "depth_bins", default_depth_bins());
  cfg.noise = section(doc, "noise", NoiseModel{});
  cfg.disturbance = section(doc, "disturbance", DisturbanceSpec{1.67, 1.67, 0, 100});
  if (!doc.contains("disturbance") || !doc.at("disturbance").contains("seed")) cfg.disturbance.seed = cfg.seed;
  if (overrides.seed) cfg.disturbance.seed = cfg.seed;

  const json lift = doc.value("lift", json::object());
  cfg.lift.pixel_stride = positive_int(lift, "pixel_stride", cfg.lift.pixel_stride);
  cfg.lift.context_channels = positive_int(lift, "context_channels", cfg.lift.context_channels);
  cfg.lift.export_wedge = lift.value("export_wedge", false);

  cfg.grid = section(doc, "grid", GridSpec{});
  cfg.grid.channels = cfg.lift.context_channels;

  const json render = doc.value("render", json::object());
  cfg.render.stride = positive_int(render, "stride", cfg.render.stride);
  cfg.render.histogram_stride = positive_int(render, "histogram_stride", cfg.render.histogram_stride);
  cfg.render.depth_bin_width = positive_double(render, "depth_bin_width", cfg.render.depth_bin_width);
  cfg.render.height_bin_width = positive_double(render, "height_bin_width", cfg.render.height_bin_width);

  const json rob = doc.value("robustness", json::object());
  cfg.robustness.localization_trials = positive_int(rob, "localization_trials", cfg.robustness.localization_trials);
  cfg.robustness.localization_stride = positive_int(rob, "localization_stride", cfg.robustness.localization_stride);

  const json bench = doc.value("bench", json::object());
  cfg.bench.warmup = bench.contains("warmup") ? bench.at("warmup").get<int>() : cfg.bench.warmup;
  if (cfg.bench.warmup < 0) throw Error(ErrorCode::kConfig, "bench.warmup must be >= 0");
  cfg.bench.iterations = positive_int(bench, "iterations", cfg.bench.iterations);
  cfg.bench.height_bins = section(bench, "height_bins", cfg.bench.height_bins);
  cfg.bench.depth_bins = section(bench, "depth_bins", cfg.bench.depth_bins);
  if (!cfg.bench.height_bins.is_height() || cfg.bench.depth_bins.is_height()) {
    throw Error(ErrorCode::kConfig, "bench: need height bins and DEPTH_UD depth bins");
  }

  cfg.height_bins.validate();
  cfg.depth_bins.validate();
  cfg.grid.validate();
  cfg.noise.validate();
  cfg.disturbance.validate();
  cfg.bench.height_bins.validate();
  cfg.bench.depth_bins.validate();
  if (!cfg.height_bins.is_height()) throw Error(ErrorCode::kConfig, "height_bins: DEPTH_UD is not a height strategy");
  if (cfg.depth_bins.is_height()) throw Error(ErrorCode::kConfig, "depth_bins: strategy must be DEPTH_UD");

  cfg.effective = json{
      {"schema_version", 1},
      {"seed", cfg.seed},
      {"rig", rig_doc},
      {"scene", cfg.scene.path ? json{{"path", cfg.scene.path->filename().string()},
                                      {"content", read_json_file(*cfg.scene.path)}}
                               : json{{"template", std::string(template_name(cfg.scene.templ))},
                                      {"n_boxes", cfg.scene.n_boxes}}},
      {"height_bins", cfg.height_bins},
      {"depth_bins", cfg.depth_bins},
      {"grid", cfg.grid},
      {"noise", cfg.noise},
      {"disturbance", cfg.disturbance},
      {"render", {{"stride", cfg.render.stride},
                  {"histogram_stride", cfg.render.histogram_stride},
                  {"depth_bin_width", cfg.render.depth_bin_width},
                  {"height_bin_width", cfg.render.height_bin_width}}},
      {"lift", {{"pixel_stride", cfg.lift.pixel_stride},
                {"context_channels", cfg.lift.context_channels},
                {"export_wedge", cfg.lift.export_wedge}}},
      {"robustness", {{"localization_trials", cfg.robustness.localization_trials},
                      {"localization_stride", cfg.robustness.localization_stride}}},
      {"bench", {{"warmup", cfg.bench.warmup},
                 {"iterations", cfg.bench.iterations},
                 {"height_bins", cfg.bench.height_bins},
                 {"depth_bins", cfg.bench.depth_bins}}},
      {"format", std::string(format_name(cfg.format))},
      {"deterministic", cfg.deterministic},
  };
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path, const Overrides& overrides) {
  const json doc = read_json_file(path);
  return config_from_json(doc, path.parent_path(), overrides);
}

Scene resolve_scene(const ExperimentConfig& cfg) {
  if (cfg.scene.path) return load_scene(*cfg.scene.path);
  return generate_scene(cfg.scene.templ, cfg.scene.n_boxes, cfg.seed);
}

}  // namespace hlift::app
