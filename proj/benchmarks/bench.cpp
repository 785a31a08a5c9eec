#include <benchmark/benchmark.h>

#include "hlift/bevpool.hpp"
#include "hlift/binning.hpp"
#include "hlift/lifting.hpp"
#include "hlift/rng.hpp"
#include "hlift/scene.hpp"

namespace {

using namespace hlift;

CameraRig bench_rig() {
  CameraPose pose;
  pose.position = Vec3(0.0, 0.0, 5.0);
  pose.pitch_down = deg_to_rad(10.0);
  return CameraRig({1000.0, 1000.0, 768.0, 432.0, 1536, 864}, extrinsics_from_pose(pose), "bench");
}

constexpr int kStride = 16;
constexpr int kChannels = 8;

FusedMap random_fused(int n_bins, std::uint64_t seed) {
  const int w = 1536 / kStride, h = 864 / kStride;
  ContextMap ctx(w, h, kChannels);
  DistributionMap dist(w, h, n_bins);
  Rng rng(seed);
  for (double& x : ctx.data) x = rng.uniform();
  for (std::size_t m = 0; m < dist.cell_count(); ++m) {
    double sum = 0.0;
    for (double& p : dist.cell(m)) sum += (p = rng.uniform() + 1e-3);
    for (double& p : dist.cell(m)) p /= sum;
  }
  return fuse(std::move(ctx), std::move(dist));
}

void BM_LiftPoolHeight(benchmark::State& state) {
  const CameraRig rig = bench_rig();
  const BinSpec bins = default_height_bins();
  const FusedMap fused = random_fused(bins.n_bins, 1);
  const GridSpec grid{0.0, 102.4, -51.2, 51.2, 0.8, 0.8, kChannels};
  std::size_t points = 0;
  for (auto _ : state) {
    const WedgeCloud cloud = build_wedge(fused, bins, rig, kStride);
    benchmark::DoNotOptimize(pool(cloud, grid, PoolMode::kFixedOrder));
    points = cloud.size();
  }
  state.counters["points"] = static_cast<double>(points);
}
BENCHMARK(BM_LiftPoolHeight)->Unit(benchmark::kMillisecond);

void BM_LiftPoolDepth(benchmark::State& state) {
  const CameraRig rig = bench_rig();
  const BinSpec bins = default_depth_bins();
  const FusedMap fused = random_fused(bins.n_bins, 2);
  const GridSpec grid{0.0, 102.4, -51.2, 51.2, 0.8, 0.8, kChannels};
  std::size_t points = 0;
  for (auto _ : state) {
    const WedgeCloud cloud = build_wedge_depth(fused, bins, rig, kStride);
    benchmark::DoNotOptimize(pool(cloud, grid, PoolMode::kFixedOrder));
    points = cloud.size();
  }
  state.counters["points"] = static_cast<double>(points);
}
BENCHMARK(BM_LiftPoolDepth)->Unit(benchmark::kMillisecond);

void BM_PoolModes(benchmark::State& state) {
  const CameraRig rig = bench_rig();
  const WedgeCloud cloud = build_wedge(random_fused(90, 3), default_height_bins(), rig, kStride);
  const GridSpec grid{0.0, 102.4, -51.2, 51.2, 0.8, 0.8, kChannels};
  const auto mode = static_cast<PoolMode>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(pool(cloud, grid, mode));
}
BENCHMARK(BM_PoolModes)
    ->Arg(static_cast<int>(PoolMode::kFixedOrder))
    ->Arg(static_cast<int>(PoolMode::kParallel))
    ->Arg(static_cast<int>(PoolMode::kCanonical))
    ->Unit(benchmark::kMillisecond);

void BM_ValueToBin(benchmark::State& state) {
  const BinSpec spec{static_cast<BinStrategy>(state.range(0)), 90, -1.0, 1.0, 2.0};
  Rng rng(4);
  std::vector<double> xs(4096);
  for (double& x : xs) x = rng.uniform(-1.0, 1.0);
  for (auto _ : state) {
    int acc = 0;
    for (double x : xs) acc += value_to_bin(x, spec);
    benchmark::DoNotOptimize(acc);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(xs.size()));
}
BENCHMARK(BM_ValueToBin)
    ->Arg(static_cast<int>(BinStrategy::kUniform))
    ->Arg(static_cast<int>(BinStrategy::kDynamicIncreasing))
    ->Arg(static_cast<int>(BinStrategy::kSpacingIncreasing))
    ->Arg(static_cast<int>(BinStrategy::kLinearIncreasing));

void BM_RenderCorridor(benchmark::State& state) {
  const CameraRig rig = bench_rig();
  const Scene scene = generate_scene(SceneTemplate::kCorridor, 20, 7);
  for (auto _ : state) benchmark::DoNotOptimize(render(scene, rig, static_cast<int>(state.range(0))));
}
BENCHMARK(BM_RenderCorridor)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
