#include "hlift/robustness.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "hlift/error.hpp"
#include "hlift/lifting.hpp"
#include "hlift/rng.hpp"

namespace hlift {

void DisturbanceSpec::validate() const {
  if (!(sigma_roll_deg >= 0.0) || !(sigma_pitch_deg >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "disturbance: sigmas must be >= 0");
  }
  if (n_trials < 1) throw Error(ErrorCode::kInvalidArgument, "disturbance: n_trials must be >= 1");
}

Extrinsics perturb_extrinsics(const Extrinsics& extrinsics, double roll_deg, double pitch_deg) {
  const Mat3 delta = rotation_z(deg_to_rad(roll_deg)) * rotation_x(deg_to_rad(pitch_deg));
  Extrinsics out;
  out.rotation = delta * extrinsics.rotation;
  out.translation = delta * extrinsics.translation;
  return out;
}

CameraRig perturb_rig(const CameraRig& rig, const Disturbance& d) {
  return CameraRig(rig.intrinsics(), perturb_extrinsics(rig.extrinsics(), d.roll_deg, d.pitch_deg), rig.id());
}

std::vector<Disturbance> sample_disturbances(const DisturbanceSpec& spec) {
  spec.validate();
  std::vector<Disturbance> out(static_cast<std::size_t>(spec.n_trials));
  for (int k = 0; k < spec.n_trials; ++k) {
    Rng rng(spec.seed, static_cast<std::uint64_t>(k));
    out[static_cast<std::size_t>(k)].roll_deg = rng.normal(0.0, spec.sigma_roll_deg);
    out[static_cast<std::size_t>(k)].pitch_deg = rng.normal(0.0, spec.sigma_pitch_deg);
  }
  return out;
}

double histogram_intersection(const std::vector<ScatterPoint>& a, const std::vector<ScatterPoint>& b,
                              double v_bin, double value_bin) {
  if (a.empty() || b.empty()) return 0.0;
  using Key = std::pair<long long, long long>;
  auto bin = [&](const ScatterPoint& p) {
    return Key{static_cast<long long>(std::floor(p.v / v_bin)),
               static_cast<long long>(std::floor(p.value / value_bin))};
  };
  std::map<Key, std::pair<double, double>> cells;
  const double wa = 1.0 / static_cast<double>(a.size());
  const double wb = 1.0 / static_cast<double>(b.size());
  for (const auto& p : a) cells[bin(p)].first += wa;
  for (const auto& p : b) cells[bin(p)].second += wb;
  double sum = 0.0;
  for (const auto& [key, mass] : cells) sum += std::min(mass.first, mass.second);
  return std::clamp(sum, 0.0, 1.0);
}

namespace {

struct CenterObservation {
  bool visible = false;
  double v = 0.0;
  double depth = 0.0;
};

CenterObservation observe(const CameraRig& rig, const Vec3& center) {
  const auto proj = rig.project(center);
  if (!proj || !rig.intrinsics().contains(proj->u, proj->v)) return {};
  return {true, proj->v, proj->depth};
}

}  // namespace

OverlapReport scatter_overlap(const Scene& scene, const CameraRig& rig, const DisturbanceSpec& spec,
                              const OverlapBins& bins) {
  OverlapReport report;
  report.bins = bins;
  std::vector<CenterObservation> clean(scene.objects.size());
  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    clean[k] = observe(rig, scene.objects[k].box.center());
    if (clean[k].visible) ++report.n_points;
  }
  if (report.n_points == 0) {
    throw Error(ErrorCode::kNoVisibleObjects, "scatter_overlap: no object center is visible");
  }

  const auto disturbances = sample_disturbances(spec);
  for (std::size_t t = 0; t < disturbances.size(); ++t) {
    const CameraRig noisy = perturb_rig(rig, disturbances[t]);
    std::vector<ScatterPoint> depth_clean, depth_noisy, height_clean, height_noisy;
    for (std::size_t k = 0; k < scene.objects.size(); ++k) {
      if (!clean[k].visible) continue;
      const Vec3 center = scene.objects[k].box.center();
      const CenterObservation obs = observe(noisy, center);
      if (!obs.visible) continue;
      depth_clean.push_back({clean[k].v, clean[k].depth});
      depth_noisy.push_back({obs.v, obs.depth});
      // Height above ground is a property of the object, not of the camera.
      height_clean.push_back({clean[k].v, center.z()});
      height_noisy.push_back({obs.v, center.z()});
    }
    TrialOverlap trial;
    trial.trial = static_cast<int>(t);
    trial.disturbance = disturbances[t];
    trial.n_points = depth_clean.size();
    trial.overlap_depth = histogram_intersection(depth_clean, depth_noisy, bins.v_px, bins.depth_m);
    trial.overlap_height = histogram_intersection(height_clean, height_noisy, bins.v_px, bins.height_m);
    report.trials.push_back(trial);
  }
  for (const auto& t : report.trials) {
    report.overlap_depth += t.overlap_depth;
    report.overlap_height += t.overlap_height;
  }
  report.overlap_depth /= static_cast<double>(report.trials.size());
  report.overlap_height /= static_cast<double>(report.trials.size());
  return report;
}

std::string_view parameterization_name(Parameterization p) {
  return p == Parameterization::kHeight ? "height" : "depth";
}

ErrorSummary summarize(std::vector<double> values) {
  ErrorSummary s;
  s.count = values.size();
  if (values.empty()) return s;
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(values.size());
  auto rank = [&](double q) {
    const auto idx = static_cast<std::size_t>(std::ceil(q * static_cast<double>(values.size())));
    return values[std::clamp<std::size_t>(idx, 1, values.size()) - 1];
  };
  s.median = rank(0.5);
  s.p90 = rank(0.9);
  return s;
}

void ErrorReport::finalize() {
  std::vector<double> h, d;
  for (const auto& r : rows) (r.param == Parameterization::kHeight ? h : d).push_back(r.distance_error);
  height = summarize(std::move(h));
  depth = summarize(std::move(d));
}

void ErrorReport::merge(const ErrorReport& other) {
  rows.insert(rows.end(), other.rows.begin(), other.rows.end());
  skipped_pixels += other.skipped_pixels;
  disturbed = disturbed || other.disturbed;
  finalize();
}

namespace {

struct Accumulator {
  Vec3 estimate = Vec3::Zero();
  double weight = 0.0;
  Vec3 truth = Vec3::Zero();
  std::size_t pixels = 0;
};

bool in_range(double x, const BinSpec& b) { return x >= b.range_min && x <= b.range_max; }

double biased_target(double x, const NoiseModel& noise) {
  return noise.kind == NoiseKind::kBias ? x + noise.bias_m : x;
}

}  // namespace

ErrorReport localization_error(const Scene& scene, const CameraRig& rig, const LocalizationSetup& setup,
                               const std::optional<Disturbance>& disturbance, int trial) {
  setup.height_bins.validate();
  setup.depth_bins.validate();
  setup.noise.validate();
  if (!setup.height_bins.is_height() || setup.depth_bins.strategy != BinStrategy::kDepthUniform) {
    throw Error(ErrorCode::kInvalidArgument, "localization_error: need height bins and DEPTH_UD bins");
  }

  const CameraRig observed = disturbance ? perturb_rig(rig, *disturbance) : rig;
  const PixelMaps maps = render(scene, observed, setup.render_stride);
  const HeightLifter nominal(rig);
  const HeightLifter lifter(observed);
  const std::vector<double> heights = bin_values(setup.height_bins);
  const std::vector<double> depths = bin_values(setup.depth_bins);
  if (!(heights.back() < lifter.ground_height())) {
    throw Error(ErrorCode::kAboveCamera, "localization_error: height bins reach the camera height");
  }
  const Vec3 cam = observed.camera_center();
  const Mat3 pixel_to_ego = observed.cam_to_ego().rotation * observed.intrinsics().matrix().inverse();

  ErrorReport report;
  report.camera_height = observed.ground_height();
  report.disturbed = disturbance.has_value();
  std::vector<Accumulator> height_acc(scene.objects.size()), depth_acc(scene.objects.size());

  for (std::size_t m = 0; m < maps.size(); ++m) {
    if (maps.kind[m] != HitKind::kBox) continue;
    const Vec2 px = maps.pixel(m);
    const double h_true = maps.height_above_ground[m];

    const LiftResult prior = nominal.lift(px.x(), px.y(), h_true);
    const double y = lifter.ref_y(px.x(), px.y());
    if (!prior.ok() || !(y > kHorizonEpsilon)) {
      ++report.skipped_pixels;
      continue;
    }
    const double d_prior = rig.to_camera(prior.point).z();
    if (!in_range(biased_target(h_true, setup.noise), setup.height_bins) ||
        !in_range(biased_target(d_prior, setup.noise), setup.depth_bins)) {
      ++report.skipped_pixels;
      continue;
    }
    const auto wh = predict_bins(h_true, setup.height_bins, setup.noise);
    const auto wd = predict_bins(d_prior, setup.depth_bins, setup.noise);

    const Vec3 ray = lifter.ray_ego(px.x(), px.y());
    const Vec3 depth_ray = pixel_to_ego * Vec3(px.x(), px.y(), 1.0);
    const auto k = static_cast<std::size_t>(maps.object[m]);
    Accumulator& ha = height_acc[k];
    Accumulator& da = depth_acc[k];
    for (std::size_t i = 0; i < wh.size(); ++i) {
      if (wh[i] == 0.0) continue;
      ha.estimate += wh[i] * lifter.lift_unchecked(ray, y, heights[i]);
      ha.weight += wh[i];
    }
    for (std::size_t i = 0; i < wd.size(); ++i) {
      if (wd[i] == 0.0) continue;
      da.estimate += wd[i] * (cam + depths[i] * depth_ray);
      da.weight += wd[i];
    }
    ha.truth += maps.points[m];
    da.truth += maps.points[m];
    ++ha.pixels;
    ++da.pixels;
  }

  for (std::size_t k = 0; k < scene.objects.size(); ++k) {
    for (auto [acc, param] : {std::pair{&height_acc[k], Parameterization::kHeight},
                              std::pair{&depth_acc[k], Parameterization::kDepth}}) {
      if (acc->pixels == 0) continue;
      const Vec3 est = acc->estimate / acc->weight;
      const Vec3 truth = acc->truth / static_cast<double>(acc->pixels);
      ObjectError row;
      row.trial = trial;
      row.object = static_cast<int>(k);
      row.param = param;
      row.true_distance = (truth - cam).norm();
      row.distance_error = std::abs((est - cam).norm() - row.true_distance);
      row.center_error = (est - truth).norm();
      row.n_pixels = acc->pixels;
      report.rows.push_back(row);
    }
  }
  report.finalize();
  return report;
}

ErrorReport localization_study(const Scene& scene, const CameraRig& rig, const LocalizationSetup& setup,
                               const DisturbanceSpec& spec) {
  const auto disturbances = sample_disturbances(spec);
  ErrorReport merged;
  merged.camera_height = rig.ground_height();
  for (std::size_t t = 0; t < disturbances.size(); ++t) {
    merged.merge(localization_error(scene, rig, setup, disturbances[t], static_cast<int>(t)));
  }
  merged.disturbed = true;
  return merged;
}

double height_error_law(double d_ground_range, double delta_h, double camera_height, double h) {
  if (!(camera_height > h + delta_h) || !(camera_height > h) || !(d_ground_range > 0.0)) {
    throw Error(ErrorCode::kInvalidGeometry, "height_error_law: need H > h + delta_h, H > h and d > 0");
  }
  return d_ground_range * delta_h / (camera_height - h);
}

}  // namespace hlift
