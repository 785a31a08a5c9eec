#include "app/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <vector>

#include "hlift/error.hpp"
#include "hlift/rng.hpp"
#include "hlift/tensor_io.hpp"

namespace hlift::app {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIo, "cannot open " + path.string() + " for writing");
  return out;
}

fs::path prepare_out(const ExperimentConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.out_dir, ec);
  if (ec) throw Error(ErrorCode::kIo, "cannot create " + cfg.out_dir.string() + ": " + ec.message());
  return cfg.out_dir;
}

json provenance_json(const ExperimentConfig& cfg) {
  return {{"config_hash", cfg.config_hash()}, {"seed", cfg.seed}};
}

CsvProvenance csv_prov(const ExperimentConfig& cfg) { return {cfg.provenance()}; }

// Binary tensors carry no metadata, so each one gets a sidecar with the
// provenance and the dimension order.
void write_bin(const ExperimentConfig& cfg, const fs::path& path, const Tensor& t, const json& layout) {
  write_tensor_file(path, t);
  json meta = {{"provenance", provenance_json(cfg)}, {"dims", t.dims}, {"layout", layout}};
  write_json_file(fs::path(path).concat(".json"), meta);
}

json number_or_null(double x) { return std::isnan(x) ? json(nullptr) : json(x); }

void write_grid(const ExperimentConfig& cfg, const fs::path& dir, const std::string& stem, const BevGrid& grid) {
  switch (cfg.format) {
    case OutputFormat::kCsv: {
      auto out = open_out(dir / (stem + ".csv"));
      write_grid_csv(out, grid, csv_prov(cfg));
      break;
    }
    case OutputFormat::kJson: {
      json cells = json::array();
      for (int iy = 0; iy < grid.ny; ++iy) {
        for (int ix = 0; ix < grid.nx; ++ix) {
          const auto m = static_cast<std::size_t>(iy) * grid.nx + ix;
          if (grid.hit_count[m] == 0) continue;
          const auto v = grid.cell(ix, iy);
          cells.push_back({{"ix", ix}, {"iy", iy}, {"hits", grid.hit_count[m]},
                           {"values", std::vector<double>(v.begin(), v.end())}});
        }
      }
      write_json_file(dir / (stem + ".json"), {{"provenance", provenance_json(cfg)},
                                               {"grid", grid.spec},
                                               {"nx", grid.nx},
                                               {"ny", grid.ny},
                                               {"cells", cells}});
      break;
    }
    case OutputFormat::kBin:
      write_bin(cfg, dir / (stem + ".bin"), to_tensor(grid), "iy,ix,channel");
      break;
  }
}

void write_wedge(const ExperimentConfig& cfg, const fs::path& dir, const std::string& stem, const WedgeCloud& cloud) {
  switch (cfg.format) {
    case OutputFormat::kCsv: {
      auto out = open_out(dir / (stem + ".csv"));
      write_wedge_csv(out, cloud, csv_prov(cfg));
      break;
    }
    case OutputFormat::kJson: {
      json pts = json::array();
      for (std::size_t p = 0; p < cloud.size(); ++p) {
        const auto f = cloud.feature(p);
        pts.push_back({{"xyz", {cloud.positions[p].x(), cloud.positions[p].y(), cloud.positions[p].z()}},
                       {"weight", cloud.weights[p]},
                       {"features", std::vector<double>(f.begin(), f.end())}});
      }
      write_json_file(dir / (stem + ".json"), {{"provenance", provenance_json(cfg)}, {"points", pts}});
      break;
    }
    case OutputFormat::kBin:
      write_bin(cfg, dir / (stem + ".bin"), to_tensor(cloud), "point,[x,y,z,weight,f0..]");
      break;
  }
}

void write_pixelmaps(const ExperimentConfig& cfg, const fs::path& dir, const PixelMaps& maps) {
  switch (cfg.format) {
    case OutputFormat::kCsv: {
      auto out = open_out(dir / "pixelmaps.csv");
      write_pixelmaps_csv(out, maps, csv_prov(cfg));
      break;
    }
    case OutputFormat::kJson: {
      json depth = json::array(), height = json::array();
      for (std::size_t m = 0; m < maps.size(); ++m) {
        depth.push_back(number_or_null(maps.depth[m]));
        height.push_back(number_or_null(maps.height_above_ground[m]));
      }
      write_json_file(dir / "pixelmaps.json", {{"provenance", provenance_json(cfg)},
                                               {"width", maps.width},
                                               {"height", maps.height},
                                               {"stride", maps.stride},
                                               {"depth", depth},
                                               {"height_above_ground", height}});
      break;
    }
    case OutputFormat::kBin:
      write_bin(cfg, dir / "pixelmaps.bin", to_tensor(maps), "[depth,height],row,col");
      break;
  }
}

PathCounts counts_of(const WedgeCloud& cloud, const BevGrid& grid) {
  return {cloud.size(), cloud.masked_cells, cloud.horizon_skipped_cells, grid.dropped, grid_checksum(grid)};
}

json counts_json(const PathCounts& c) {
  return {{"points", c.points},
          {"masked_cells", c.masked_cells},
          {"horizon_skipped_cells", c.horizon_skipped_cells},
          {"dropped", c.dropped},
          {"grid_checksum", c.grid_checksum}};
}

void write_point_counts(const ExperimentConfig& cfg, const fs::path& path, const BinSpec& hb, const BinSpec& db,
                        std::size_t cells, const PathCounts& h, const PathCounts& d) {
  auto out = open_out(path);
  out << "# " << cfg.provenance() << '\n';
  out << "path,n_bins,cells,masked_cells,horizon_skipped_cells,points,dropped\n";
  out << "height," << hb.n_bins << ',' << cells << ',' << h.masked_cells << ',' << h.horizon_skipped_cells << ','
      << h.points << ',' << h.dropped << '\n';
  out << "depth," << db.n_bins << ',' << cells << ',' << d.masked_cells << ',' << d.horizon_skipped_cells << ','
      << d.points << ',' << d.dropped << '\n';
}

PoolMode pool_mode(const ExperimentConfig& cfg) {
  return cfg.deterministic ? PoolMode::kFixedOrder : PoolMode::kParallel;
}

json summary_json(const ErrorSummary& s) {
  return {{"count", s.count}, {"mean", s.mean}, {"median", s.median}, {"p90", s.p90}};
}

}  // namespace

std::string grid_checksum(const BevGrid& grid) {
  std::string bytes(reinterpret_cast<const char*>(grid.data.data()), grid.data.size() * sizeof(double));
  bytes.append(reinterpret_cast<const char*>(grid.hit_count.data()), grid.hit_count.size() * sizeof(std::uint32_t));
  return fnv1a_hex(bytes);
}

ContextMap synthetic_context(int width, int height, int channels, std::uint64_t seed) {
  ContextMap ctx(width, height, channels);
  for (std::size_t m = 0; m < ctx.cell_count(); ++m) {
    Rng rng(seed, m);
    auto cell = ctx.cell(m);
    cell[0] = 1.0;
    for (int c = 1; c < channels; ++c) cell[static_cast<std::size_t>(c)] = rng.uniform();
  }
  return ctx;
}

RenderRun cmd_render(const ExperimentConfig& cfg) {
  const fs::path dir = prepare_out(cfg);
  const Scene scene = resolve_scene(cfg);
  const CameraRig& rig = cfg.camera();

  json scene_doc = scene;
  scene_doc["provenance"] = provenance_json(cfg);
  write_json_file(dir / "scene.json", scene_doc);
  write_pixelmaps(cfg, dir, render(scene, rig, cfg.render.stride));

  const PixelMaps fine = render(scene, rig, cfg.render.histogram_stride);
  std::vector<double> depths, heights;
  for (std::size_t m = 0; m < fine.size(); ++m) {
    if (fine.kind[m] == HitKind::kSky) continue;
    depths.push_back(fine.depth[m]);
    heights.push_back(fine.height_above_ground[m]);
  }
  const Histogram hd = histogram(depths, cfg.render.depth_bin_width);
  const Histogram hh = histogram(heights, cfg.render.height_bin_width);
  {
    auto out = open_out(dir / "hist_depth.csv");
    write_histogram_csv(out, hd, csv_prov(cfg));
  }
  {
    auto out = open_out(dir / "hist_height.csv");
    write_histogram_csv(out, hh, csv_prov(cfg));
  }

  RenderRun run{hd.spread(), hh.spread(), depths.size()};
  write_json_file(dir / "summary.json",
                  {{"command", "render"},
                   {"provenance", provenance_json(cfg)},
                   {"surface_pixels", run.surface_pixels},
                   {"histogram_stride", cfg.render.histogram_stride},
                   {"depth", {{"min", hd.min_value}, {"max", hd.max_value}, {"spread", hd.spread()}}},
                   {"height", {{"min", hh.min_value}, {"max", hh.max_value}, {"spread", hh.spread()}}},
                   {"spread_ratio", hh.spread() > 0.0 ? json(hd.spread() / hh.spread()) : json(nullptr)}});
  return run;
}

LiftRun cmd_lift(const ExperimentConfig& cfg) {
  const fs::path dir = prepare_out(cfg);
  const Scene scene = resolve_scene(cfg);
  const CameraRig& rig = cfg.camera();
  const int stride = cfg.lift.pixel_stride;
  const PixelMaps maps = render(scene, rig, stride);

  // Both paths see the same cells: anything the scene does not cover, or
  // whose truth falls outside either bin range, is masked for both.
  auto in = [](double x, const BinSpec& b) { return x >= b.range_min && x <= b.range_max; };
  const double nan = std::numeric_limits<double>::quiet_NaN();
  std::vector<double> ht(maps.size(), nan), dt(maps.size(), nan);
  for (std::size_t m = 0; m < maps.size(); ++m) {
    if (maps.kind[m] == HitKind::kSky) continue;
    if (!in(maps.height_above_ground[m], cfg.height_bins) || !in(maps.depth[m], cfg.depth_bins)) continue;
    ht[m] = maps.height_above_ground[m];
    dt[m] = maps.depth[m];
  }
  const ContextMap ctx = synthetic_context(maps.width, maps.height, cfg.lift.context_channels, cfg.seed);
  const FusedMap fh = fuse(ctx, predict_distribution(ht, maps.width, maps.height, cfg.height_bins, cfg.noise));
  const FusedMap fd = fuse(ctx, predict_distribution(dt, maps.width, maps.height, cfg.depth_bins, cfg.noise));

  const WedgeCloud wh = build_wedge(fh, cfg.height_bins, rig, stride);
  const WedgeCloud wd = build_wedge_depth(fd, cfg.depth_bins, rig, stride);
  const BevGrid gh = pool(wh, cfg.grid, pool_mode(cfg));
  const BevGrid gd = pool(wd, cfg.grid, pool_mode(cfg));

  write_grid(cfg, dir, "bev_height", gh);
  write_grid(cfg, dir, "bev_depth", gd);
  if (cfg.lift.export_wedge) {
    write_wedge(cfg, dir, "wedge_height", wh);
    write_wedge(cfg, dir, "wedge_depth", wd);
  }

  LiftRun run{counts_of(wh, gh), counts_of(wd, gd)};
  write_point_counts(cfg, dir / "point_counts.csv", cfg.height_bins, cfg.depth_bins, maps.size(), run.height,
                     run.depth);
  write_json_file(dir / "summary.json", {{"command", "lift"},
                                         {"provenance", provenance_json(cfg)},
                                         {"cells", maps.size()},
                                         {"height", counts_json(run.height)},
                                         {"depth", counts_json(run.depth)}});
  return run;
}

RobustnessRun cmd_robustness(const ExperimentConfig& cfg) {
  const fs::path dir = prepare_out(cfg);
  const Scene scene = resolve_scene(cfg);
  const CameraRig& rig = cfg.camera();

  RobustnessRun run;
  run.overlap = scatter_overlap(scene, rig, cfg.disturbance);

  const LocalizationSetup setup{cfg.height_bins, cfg.depth_bins, cfg.noise, cfg.robustness.localization_stride};
  DisturbanceSpec loc = cfg.disturbance;
  loc.n_trials = cfg.robustness.localization_trials;
  run.clean = localization_error(scene, rig, setup, std::nullopt);
  run.disturbed = localization_study(scene, rig, setup, loc);

  {
    auto out = open_out(dir / "overlap_trials.csv");
    out << "# " << cfg.provenance() << '\n';
    out << "trial,roll_deg,pitch_deg,n_points,overlap_depth,overlap_height\n";
    for (const auto& t : run.overlap.trials) {
      out << t.trial << ',' << format_number(t.disturbance.roll_deg) << ','
          << format_number(t.disturbance.pitch_deg) << ',' << t.n_points << ','
          << format_number(t.overlap_depth) << ',' << format_number(t.overlap_height) << '\n';
    }
  }
  {
    auto out = open_out(dir / "robustness_long.csv");
    out << "# " << cfg.provenance() << '\n';
    out << "trial,object,parameterization,metric,value\n";
    for (const ErrorReport* rep : {&run.clean, &run.disturbed}) {
      for (const auto& r : rep->rows) {
        const auto p = parameterization_name(r.param);
        auto row = [&](const char* metric, double v) {
          out << r.trial << ',' << r.object << ',' << p << ',' << metric << ',' << format_number(v) << '\n';
        };
        row("distance_error", r.distance_error);
        row("center_error", r.center_error);
        row("true_distance", r.true_distance);
        row("n_pixels", static_cast<double>(r.n_pixels));
      }
    }
  }

  std::size_t height_wins = 0;
  for (const auto& t : run.overlap.trials) height_wins += t.overlap_height > t.overlap_depth ? 1 : 0;
  write_json_file(dir / "summary.json",
                  {{"command", "robustness"},
                   {"provenance", provenance_json(cfg)},
                   {"overlap", {{"trials", run.overlap.trials.size()},
                                {"visible_objects", run.overlap.n_points},
                                {"mean_height", run.overlap.overlap_height},
                                {"mean_depth", run.overlap.overlap_depth},
                                {"height_wins", height_wins}}},
                   {"localization", {{"trials", loc.n_trials},
                                     {"clean", {{"height", summary_json(run.clean.height)},
                                                {"depth", summary_json(run.clean.depth)}}},
                                     {"disturbed", {{"height", summary_json(run.disturbed.height)},
                                                    {"depth", summary_json(run.disturbed.depth)},
                                                    {"skipped_pixels", run.disturbed.skipped_pixels}}}}}});
  return run;
}

namespace {

DistributionMap random_distribution(int width, int height, int n_bins, std::uint64_t seed) {
  DistributionMap dist(width, height, n_bins);
  for (std::size_t m = 0; m < dist.cell_count(); ++m) {
    Rng rng(seed, m);
    auto cell = dist.cell(m);
    double sum = 0.0;
    for (double& w : cell) sum += (w = rng.uniform() + 1e-3);
    for (double& w : cell) w /= sum;
  }
  return dist;
}

template <typename Fn>
double median_ms(int warmup, int iterations, Fn&& fn) {
  for (int i = 0; i < warmup; ++i) fn();
  std::vector<double> ms;
  for (int i = 0; i < iterations; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    fn();
    const auto t1 = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
  }
  std::sort(ms.begin(), ms.end());
  const std::size_t n = ms.size();
  return n % 2 ? ms[n / 2] : 0.5 * (ms[n / 2 - 1] + ms[n / 2]);
}

}  // namespace

BenchRun cmd_bench(const ExperimentConfig& cfg) {
  const fs::path dir = prepare_out(cfg);
  const CameraRig& rig = cfg.camera();
  const int stride = cfg.lift.pixel_stride;
  const int w = rig.intrinsics().image_w / stride;
  const int h = rig.intrinsics().image_h / stride;
  const BinSpec& hb = cfg.bench.height_bins;
  const BinSpec& db = cfg.bench.depth_bins;

  const ContextMap ctx = synthetic_context(w, h, cfg.lift.context_channels, cfg.seed);
  const FusedMap fh = fuse(ctx, random_distribution(w, h, hb.n_bins, substream_seed(cfg.seed, 1)));
  const FusedMap fd = fuse(ctx, random_distribution(w, h, db.n_bins, substream_seed(cfg.seed, 2)));
  const PoolMode mode = pool_mode(cfg);

  BenchRun run;
  run.height_ms = median_ms(cfg.bench.warmup, cfg.bench.iterations, [&] {
    const WedgeCloud c = build_wedge(fh, hb, rig, stride);
    const BevGrid g = pool(c, cfg.grid, mode);
    run.height = counts_of(c, g);
  });
  run.depth_ms = median_ms(cfg.bench.warmup, cfg.bench.iterations, [&] {
    const WedgeCloud c = build_wedge_depth(fd, db, rig, stride);
    const BevGrid g = pool(c, cfg.grid, mode);
    run.depth = counts_of(c, g);
  });

  write_point_counts(cfg, dir / "bench_points.csv", hb, db, static_cast<std::size_t>(w) * h, run.height, run.depth);
  write_json_file(dir / "bench_report.json",
                  {{"command", "bench"},
                   {"provenance", provenance_json(cfg)},
                   {"warmup", cfg.bench.warmup},
                   {"iterations", cfg.bench.iterations},
                   {"cells", static_cast<std::size_t>(w) * h},
                   {"height", {{"n_bins", hb.n_bins}, {"points", run.height.points},
                               {"median_ms", run.height_ms}}},
                   {"depth", {{"n_bins", db.n_bins}, {"points", run.depth.points},
                              {"median_ms", run.depth_ms}}},
                   {"point_ratio", static_cast<double>(run.height.points) / static_cast<double>(run.depth.points)},
                   {"time_ratio", run.ratio()}});
  return run;
}

}  // namespace hlift::app
