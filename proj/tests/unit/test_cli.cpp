#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "app/commands.hpp"
#include "golden.hpp"
#include "hlift/error.hpp"
#include "hlift/tensor_io.hpp"

namespace hlift::app {
namespace {

namespace fs = std::filesystem;

const fs::path kConfigs = HLIFT_CONFIG_DIR;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hlift_cli_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

ExperimentConfig seed7(const std::string& out, const Overrides& extra = {}) {
  Overrides o = extra;
  o.out_dir = scratch(out);
  return load_config(kConfigs / "seed7_corridor.json", o);
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(HLIFT_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

TEST(Config, LoadsCommittedConfig) {
  const ExperimentConfig cfg = seed7("load");
  EXPECT_EQ(cfg.seed, 7u);
  EXPECT_EQ(cfg.disturbance.seed, 7u);
  EXPECT_EQ(cfg.disturbance.n_trials, 100);
  EXPECT_EQ(cfg.height_bins.n_bins, 90);
  EXPECT_EQ(cfg.depth_bins.n_bins, 206);
  EXPECT_EQ(cfg.grid.channels, cfg.lift.context_channels);
  EXPECT_NEAR(cfg.camera().ground_height(), 5.0, 1e-12);
  EXPECT_EQ(cfg.bench.height_bins.range_max, 1.0);
  EXPECT_EQ(cfg.provenance(), "config_hash=" + cfg.config_hash() + " seed=7");
}

TEST(Config, HashIgnoresOutputDirButTracksSeed) {
  const ExperimentConfig a = seed7("hash_a");
  const ExperimentConfig b = seed7("hash_b");
  EXPECT_EQ(a.config_hash(), b.config_hash());
  Overrides o;
  o.seed = 8;
  const ExperimentConfig c = seed7("hash_c", o);
  EXPECT_NE(a.config_hash(), c.config_hash());
  EXPECT_EQ(c.disturbance.seed, 8u);
}

TEST(Config, MissingReferencedFile) {
  const json doc = json::parse(R"({"rig": "no_such_rig.json"})");
  try {
    config_from_json(doc, kConfigs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
  try {
    config_from_json(json::parse(R"({"scene": {"path": "scenes/missing.json"}})"), kConfigs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kConfig);
  }
}

TEST(Config, ZeroBinsRejected) {
  try {
    config_from_json(json::parse(R"({"bench": {"height_bins": {"strategy": "UD", "n_bins": 0,
        "range_min": -1, "range_max": 1}}})"), kConfigs);
    FAIL();
  } catch (const Error& e) {
    EXPECT_TRUE(is_config_error(e.code()));
  }
  EXPECT_THROW(config_from_json(json::parse(R"({"format": "xml"})"), kConfigs), Error);
  EXPECT_THROW(config_from_json(json::parse(R"({"lift": {"pixel_stride": 0}})"), kConfigs), Error);
  EXPECT_THROW(config_from_json(json::parse(R"({"depth_bins": {"strategy": "UD", "n_bins": 4,
        "range_min": 1, "range_max": 5}})"), kConfigs), Error);
}

TEST(Config, DefaultsWithoutRig) {
  const ExperimentConfig cfg = config_from_json(json::object(), kConfigs);
  EXPECT_EQ(cfg.camera().intrinsics().image_w, 1536);
  EXPECT_EQ(cfg.camera().intrinsics().image_h, 864);
  EXPECT_NEAR(cfg.camera().ground_height(), 5.0, 1e-12);
}

TEST(Render, GroundOnlyAndCorridor) {
  Overrides o;
  o.out_dir = scratch("render_ground");
  ExperimentConfig cfg = config_from_json(json::parse(R"({"scene": {"n_boxes": 0}})"), kConfigs, o);
  const RenderRun ground = cmd_render(cfg);
  EXPECT_EQ(ground.height_spread, 0.0);
  const json hist = json::parse(slurp(cfg.out_dir / "summary.json"));
  EXPECT_EQ(hist["height"]["max"].get<double>(), 0.0);

  const ExperimentConfig corridor = seed7("render_corridor");
  const RenderRun r = cmd_render(corridor);
  EXPECT_GT(r.depth_spread, 20.0 * r.height_spread);
  for (const char* f : {"pixelmaps.csv", "hist_depth.csv", "hist_height.csv"}) {
    EXPECT_EQ(first_line(corridor.out_dir / f), "# " + corridor.provenance()) << f;
  }
}

TEST(Lift, PointEconomyAndGoldenChecksum) {
  const ExperimentConfig cfg = seed7("lift");
  const LiftRun run = cmd_lift(cfg);
  EXPECT_LT(run.height.points, run.depth.points);
  EXPECT_EQ(run.height.masked_cells, run.depth.masked_cells);
  const json expected = test::golden("lift_seed7.json", {{"height_checksum", run.height.grid_checksum},
                                                           {"depth_checksum", run.depth.grid_checksum},
                                                           {"height_points", run.height.points},
                                                           {"depth_points", run.depth.points}});
  EXPECT_EQ(run.height.grid_checksum, expected["height_checksum"]);
  EXPECT_EQ(run.depth.grid_checksum, expected["depth_checksum"]);
  EXPECT_EQ(run.height.points, expected["height_points"]);
  for (const char* f : {"bev_height.csv", "bev_depth.csv", "point_counts.csv"}) {
    EXPECT_EQ(first_line(cfg.out_dir / f), "# " + cfg.provenance()) << f;
  }
}

TEST(Lift, OneHotGridNonzeroOnlyNearSurfaceCells) {
  Overrides o;
  o.out_dir = scratch("lift_onehot");
  const json doc = json::parse(R"({"seed": 7, "scene": {"template": "corridor", "n_boxes": 20},
      "noise": {"kind": "one_hot_truth"}, "lift": {"pixel_stride": 16, "context_channels": 2}})");
  const ExperimentConfig cfg = config_from_json(doc, kConfigs, o);
  cmd_lift(cfg);

  // Every non-zero cell must contain a rendered surface point from the same sampling.
  const PixelMaps maps = render(resolve_scene(cfg), cfg.camera(), cfg.lift.pixel_stride);
  std::vector<char> surface(cfg.grid.cell_count(), 0);
  for (std::size_t m = 0; m < maps.size(); ++m) {
    if (maps.kind[m] == HitKind::kSky) continue;
    if (const auto c = grid_cell_of(maps.points[m].x(), maps.points[m].y(), cfg.grid)) {
      surface[static_cast<std::size_t>(c->iy) * cfg.grid.nx() + c->ix] = 1;
    }
  }
  std::ifstream in(cfg.out_dir / "bev_height.csv");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  std::size_t rows = 0, near_surface = 0;
  while (std::getline(in, line)) {
    // Zero-weight bins still register hits, so only cells with mass count.
    int ix = 0, iy = 0;
    long hits = 0;
    char comma;
    std::istringstream ls(line);
    ls >> ix >> comma >> iy >> comma >> hits;
    bool nonzero = false;
    double value = 0.0;
    while (ls >> comma >> value) nonzero = nonzero || value != 0.0;
    if (!nonzero) continue;
    ++rows;
    // Height quantization (half a 5/90 m bin) can push a lifted point into a
    // neighbouring cell, so accept the 3x3 neighbourhood.
    bool ok = false;
    for (int dy = -1; dy <= 1; ++dy)
      for (int dx = -1; dx <= 1; ++dx) {
        const int x = ix + dx, y = iy + dy;
        if (x >= 0 && y >= 0 && x < cfg.grid.nx() && y < cfg.grid.ny() &&
            surface[static_cast<std::size_t>(y) * cfg.grid.nx() + x]) ok = true;
      }
    near_surface += ok ? 1 : 0;
  }
  EXPECT_GT(rows, 0u);
  EXPECT_EQ(near_surface, rows);
}

TEST(Bench, ReportSchema) {
  Overrides o;
  o.out_dir = scratch("bench");
  ExperimentConfig cfg = load_config(kConfigs / "seed7_corridor.json", o);
  cfg.bench.iterations = 1;
  cfg.bench.warmup = 0;
  const BenchRun run = cmd_bench(cfg);
  EXPECT_GT(run.height_ms, 0.0);
  const json report = json::parse(slurp(cfg.out_dir / "bench_report.json"));
  std::vector<std::string> keys;
  for (const auto& [k, v] : report.items()) keys.push_back(k);
  EXPECT_EQ(keys, (std::vector<std::string>{"cells", "command", "depth", "height", "iterations", "point_ratio",
                                            "provenance", "time_ratio", "warmup"}));
  for (const char* p : {"height", "depth"}) {
    EXPECT_TRUE(report[p].contains("n_bins"));
    EXPECT_TRUE(report[p].contains("points"));
    EXPECT_TRUE(report[p].contains("median_ms"));
  }
  EXPECT_EQ(report["provenance"]["seed"], 7);
}

TEST(Robustness, ArtifactsCarryProvenance) {
  Overrides o;
  o.out_dir = scratch("robustness");
  ExperimentConfig cfg = load_config(kConfigs / "seed7_corridor.json", o);
  cfg.robustness.localization_trials = 2;
  cfg.disturbance.n_trials = 10;
  const RobustnessRun run = cmd_robustness(cfg);
  EXPECT_EQ(run.overlap.trials.size(), 10u);
  EXPECT_EQ(first_line(cfg.out_dir / "overlap_trials.csv"), "# " + cfg.provenance());
  std::ifstream in(cfg.out_dir / "robustness_long.csv");
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  EXPECT_EQ(line, "trial,object,parameterization,metric,value");
}

TEST(Executable, ExitCodesAndErrorRecord) {
  const fs::path out = scratch("exe");
  EXPECT_EQ(run_cli("render --config " + (kConfigs / "seed7_corridor.json").string() + " --out " + out.string()), 0);
  EXPECT_EQ(run_cli("render --config /no/such/config.json --out " + out.string()), 2);
  EXPECT_EQ(run_cli("render"), 2);
  EXPECT_EQ(run_cli("lift --config " + (kConfigs / "seed7_corridor.json").string() + " --format yaml"), 2);

  const fs::path bad_dir = scratch("exe_bad");
  fs::create_directories(bad_dir);
  {
    std::ofstream cfg(bad_dir / "zero_bins.json");
    cfg << R"({"height_bins": {"strategy": "UD", "n_bins": 0, "range_min": -1, "range_max": 1}})";
  }
  EXPECT_EQ(run_cli("bench --config " + (bad_dir / "zero_bins.json").string() + " --out " + (bad_dir / "o").string()), 2);
  const json record = read_json_file(bad_dir / "o" / "error.json");
  EXPECT_EQ(record["error"]["exit_code"], 2);
  EXPECT_FALSE(record["error"]["message"].get<std::string>().empty());

  {
    // Height bins reaching above a 3 m camera: valid config, numeric failure.
    std::ofstream cfg(bad_dir / "above.json");
    cfg << R"({"rig": {"intrinsics": {"fx": 1000, "fy": 1000, "cx": 768, "cy": 432, "image_w": 1536,
             "image_h": 864}, "pose": {"position": [0, 0, 3], "pitch_deg": 10}},
             "scene": {"n_boxes": 0}, "height_bins": {"strategy": "UD", "n_bins": 10, "range_min": -1,
             "range_max": 4}})";
  }
  EXPECT_EQ(run_cli("lift --config " + (bad_dir / "above.json").string() + " --out " + (bad_dir / "o2").string()), 3);
  EXPECT_EQ(read_json_file(bad_dir / "o2" / "error.json")["error"]["code"], "AboveCamera");
}

TEST(Executable, BinaryFormatWritesSidecars) {
  const fs::path out = scratch("exe_bin");
  ASSERT_EQ(run_cli("lift --config " + (kConfigs / "seed7_corridor.json").string() + " --format bin --out " +
                    out.string()), 0);
  const Tensor t = read_tensor_file(out / "bev_height.bin");
  EXPECT_EQ(t.dims.size(), 3u);
  const json meta = read_json_file(out / "bev_height.bin.json");
  EXPECT_EQ(meta["provenance"]["seed"], 7);
}

}  // namespace
}  // namespace hlift::app
