#include "hlift/scene.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "hlift/error.hpp"
#include "hlift/rng.hpp"

namespace hlift {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kPlacementRetries = 2000;
constexpr double kPlacementMargin = 0.5;
}  // namespace

std::string_view class_name(ObjectClass c) {
  switch (c) {
    case ObjectClass::kCar: return "car";
    case ObjectClass::kBus: return "bus";
    case ObjectClass::kPedestrian: return "pedestrian";
    case ObjectClass::kCyclist: return "cyclist";
  }
  return "car";
}

ObjectClass parse_class(std::string_view name) {
  if (name == "car") return ObjectClass::kCar;
  if (name == "bus") return ObjectClass::kBus;
  if (name == "pedestrian") return ObjectClass::kPedestrian;
  if (name == "cyclist") return ObjectClass::kCyclist;
  throw Error(ErrorCode::kConfig, "unknown object class '" + std::string(name) + "'");
}

Vec3 class_dimensions(ObjectClass c) {
  switch (c) {
    case ObjectClass::kCar: return {4.5, 1.9, 1.6};
    case ObjectClass::kBus: return {12.0, 2.5, 3.2};
    case ObjectClass::kPedestrian: return {0.6, 0.6, 1.7};
    case ObjectClass::kCyclist: return {1.8, 0.6, 1.7};
  }
  return {4.5, 1.9, 1.6};
}

std::string_view template_name(SceneTemplate t) {
  return t == SceneTemplate::kCorridor ? "corridor" : "intersection";
}

SceneTemplate parse_template(std::string_view name) {
  if (name == "corridor") return SceneTemplate::kCorridor;
  if (name == "intersection") return SceneTemplate::kIntersection;
  throw Error(ErrorCode::kConfig, "unknown scene template '" + std::string(name) + "'");
}

namespace {

std::array<Vec2, 4> footprint(const Box3D& b, double margin) {
  const double hl = 0.5 * b.l + margin;
  const double hw = 0.5 * b.w + margin;
  const double c = std::cos(b.theta), s = std::sin(b.theta);
  std::array<Vec2, 4> out;
  const std::array<Vec2, 4> local{Vec2(hl, hw), Vec2(-hl, hw), Vec2(-hl, -hw), Vec2(hl, -hw)};
  for (std::size_t i = 0; i < 4; ++i) {
    out[i] = Vec2(b.x + c * local[i].x() - s * local[i].y(), b.y + s * local[i].x() + c * local[i].y());
  }
  return out;
}

}  // namespace

bool footprints_overlap(const Box3D& a, const Box3D& b, double margin) {
  const auto pa = footprint(a, 0.5 * margin);
  const auto pb = footprint(b, 0.5 * margin);
  // Separating axis test over the edge normals of both rectangles.
  for (const auto* poly : {&pa, &pb}) {
    for (std::size_t i = 0; i < 2; ++i) {
      const Vec2 edge = (*poly)[i + 1] - (*poly)[i];
      const Vec2 axis(-edge.y(), edge.x());
      double a_lo = std::numeric_limits<double>::infinity(), a_hi = -a_lo;
      double b_lo = a_lo, b_hi = -a_lo;
      for (const auto& p : pa) {
        a_lo = std::min(a_lo, axis.dot(p));
        a_hi = std::max(a_hi, axis.dot(p));
      }
      for (const auto& p : pb) {
        b_lo = std::min(b_lo, axis.dot(p));
        b_hi = std::max(b_hi, axis.dot(p));
      }
      if (a_hi < b_lo || b_hi < a_lo) return false;
    }
  }
  return true;
}

void Scene::validate() const {
  for (std::size_t i = 0; i < objects.size(); ++i) {
    const Box3D& b = objects[i].box;
    b.validate();
    if (b.z < 0.0) {
      throw Error(ErrorCode::kInvalidArgument, "scene: box " + std::to_string(i) + " center below ground");
    }
    for (const auto& p : footprint(b, 0.0)) {
      if (!extent.contains(p.x(), p.y())) {
        throw Error(ErrorCode::kInvalidArgument, "scene: box " + std::to_string(i) + " leaves the extent");
      }
    }
  }
}

namespace {

ObjectClass draw_class(Rng& rng) {
  const double u = rng.uniform();
  if (u < 0.55) return ObjectClass::kCar;
  if (u < 0.65) return ObjectClass::kBus;
  if (u < 0.85) return ObjectClass::kPedestrian;
  return ObjectClass::kCyclist;
}

bool is_vehicle(ObjectClass c) { return c == ObjectClass::kCar || c == ObjectClass::kBus; }

constexpr std::array<double, 4> kLanes{-5.25, -1.75, 1.75, 5.25};

Box3D propose(SceneTemplate templ, ObjectClass cls, const Extent2D& ext, Rng& rng) {
  const Vec3 dims = class_dimensions(cls);
  Box3D b;
  b.l = dims.x() * rng.uniform(0.95, 1.05);
  b.w = dims.y() * rng.uniform(0.95, 1.05);
  b.h = dims.z() * rng.uniform(0.95, 1.05);
  b.z = 0.5 * b.h;
  const double lane = kLanes[rng.below(kLanes.size())];
  if (templ == SceneTemplate::kCorridor) {
    b.x = rng.uniform(8.0, ext.x_max - 10.0);
    if (is_vehicle(cls)) {
      b.y = lane + rng.uniform(-0.3, 0.3);
      b.theta = (lane < 0.0 ? 0.0 : kPi) + rng.uniform(-0.05, 0.05);
    } else {
      const double side = rng.uniform() < 0.5 ? -1.0 : 1.0;
      b.y = side * rng.uniform(8.0, 11.0);
      b.theta = rng.uniform(-kPi, kPi);
    }
  } else {
    const double cross_x = 0.5 * (ext.x_min + ext.x_max);
    if (is_vehicle(cls)) {
      if (rng.uniform() < 0.5) {
        b.x = rng.uniform(8.0, ext.x_max - 8.0);
        b.y = lane + rng.uniform(-0.3, 0.3);
        b.theta = (lane < 0.0 ? 0.0 : kPi) + rng.uniform(-0.05, 0.05);
      } else {
        b.x = cross_x + lane + rng.uniform(-0.3, 0.3);
        b.y = rng.uniform(ext.y_min + 8.0, ext.y_max - 8.0);
        b.theta = (lane < 0.0 ? 0.5 * kPi : -0.5 * kPi) + rng.uniform(-0.05, 0.05);
      }
    } else {
      b.x = rng.uniform(8.0, ext.x_max - 4.0);
      b.y = rng.uniform(ext.y_min + 4.0, ext.y_max - 4.0);
      b.theta = rng.uniform(-kPi, kPi);
    }
  }
  b.theta = normalize_angle(b.theta);
  return b;
}

}  // namespace

Scene generate_scene(SceneTemplate templ, int n_boxes, std::uint64_t seed) {
  if (n_boxes < 0) throw Error(ErrorCode::kInvalidArgument, "generate_scene: n_boxes must be >= 0");
  Scene scene;
  scene.rng_seed = seed;
  scene.extent = templ == SceneTemplate::kCorridor ? Extent2D{0.0, 160.0, -20.0, 20.0}
                                                   : Extent2D{0.0, 100.0, -50.0, 50.0};
  for (int k = 0; k < n_boxes; ++k) {
    Rng rng(seed, static_cast<std::uint64_t>(k));
    const ObjectClass cls = draw_class(rng);
    bool placed = false;
    for (int attempt = 0; attempt < kPlacementRetries && !placed; ++attempt) {
      const Box3D cand = propose(templ, cls, scene.extent, rng);
      bool inside = true;
      for (const auto& p : footprint(cand, 0.0)) inside = inside && scene.extent.contains(p.x(), p.y());
      if (!inside) continue;
      const bool clash = std::any_of(scene.objects.begin(), scene.objects.end(), [&](const SceneObject& o) {
        return footprints_overlap(o.box, cand, kPlacementMargin);
      });
      if (clash) continue;
      scene.objects.push_back({cls, cand});
      placed = true;
    }
    if (!placed) {
      std::ostringstream msg;
      msg << "generate_scene: could not place box " << k << " after " << kPlacementRetries << " attempts";
      throw Error(ErrorCode::kExtentTooSmall, msg.str());
    }
  }
  return scene;
}

Raycaster::Raycaster(const Scene& scene, const CameraRig& rig)
    : scene_(&scene), origin_(rig.camera_center()) {
  pixel_to_ego_ = rig.cam_to_ego().rotation * rig.intrinsics().matrix().inverse();
  boxes_.reserve(scene.objects.size());
  for (const auto& o : scene.objects) {
    const Box3D& b = o.box;
    boxes_.push_back({b.center(), Vec3(0.5 * b.l, 0.5 * b.w, 0.5 * b.h), std::cos(b.theta), std::sin(b.theta)});
  }
}

RayHit Raycaster::cast(double u, double v) const {
  // With dir = R * K^-1 [u v 1], the ray parameter equals camera-frame depth.
  const Vec3 dir = pixel_to_ego_ * Vec3(u, v, 1.0);
  RayHit best;
  double best_t = std::numeric_limits<double>::infinity();

  if (dir.z() < 0.0) {
    const double t = -origin_.z() / dir.z();
    const Vec3 p = origin_ + t * dir;
    if (t > 0.0 && scene_->extent.contains(p.x(), p.y())) {
      best_t = t;
      best.kind = HitKind::kGround;
      best.point = Vec3(p.x(), p.y(), 0.0);
    }
  }

  for (std::size_t k = 0; k < boxes_.size(); ++k) {
    const PreparedBox& b = boxes_[k];
    const Vec3 rel = origin_ - b.center;
    // Rotate into the box frame (yaw only).
    const Vec3 o(b.cos_t * rel.x() + b.sin_t * rel.y(), -b.sin_t * rel.x() + b.cos_t * rel.y(), rel.z());
    const Vec3 d(b.cos_t * dir.x() + b.sin_t * dir.y(), -b.sin_t * dir.x() + b.cos_t * dir.y(), dir.z());
    double t_near = -std::numeric_limits<double>::infinity();
    double t_far = std::numeric_limits<double>::infinity();
    bool miss = false;
    for (int a = 0; a < 3 && !miss; ++a) {
      if (std::abs(d[a]) < 1e-300) {
        if (std::abs(o[a]) > b.half[a]) miss = true;
        continue;
      }
      double t0 = (-b.half[a] - o[a]) / d[a];
      double t1 = (b.half[a] - o[a]) / d[a];
      if (t0 > t1) std::swap(t0, t1);
      t_near = std::max(t_near, t0);
      t_far = std::min(t_far, t1);
      if (t_near > t_far) miss = true;
    }
    if (miss || !(t_near > 0.0) || !(t_near < best_t)) continue;
    best_t = t_near;
    best.kind = HitKind::kBox;
    best.object = static_cast<int>(k);
    best.point = origin_ + t_near * dir;
  }

  if (best.kind != HitKind::kSky) {
    best.depth = best_t;
    if (best.kind == HitKind::kGround) best.object = -1;
  }
  return best;
}

PixelMaps render(const Scene& scene, const CameraRig& rig, int sample_stride) {
  if (sample_stride < 1) throw Error(ErrorCode::kInvalidArgument, "render: stride must be >= 1");
  PixelMaps maps;
  maps.stride = sample_stride;
  maps.width = rig.intrinsics().image_w / sample_stride;
  maps.height = rig.intrinsics().image_h / sample_stride;
  const std::size_t n = static_cast<std::size_t>(maps.width) * maps.height;
  maps.depth.assign(n, kNaN);
  maps.height_above_ground.assign(n, kNaN);
  maps.kind.assign(n, HitKind::kSky);
  maps.object.assign(n, -1);
  maps.points.assign(n, Vec3::Zero());

  const Raycaster caster(scene, rig);
  for (std::size_t m = 0; m < n; ++m) {
    const Vec2 px = maps.pixel(m);
    const RayHit hit = caster.cast(px.x(), px.y());
    maps.kind[m] = hit.kind;
    if (hit.kind == HitKind::kSky) continue;
    maps.depth[m] = hit.depth;
    maps.height_above_ground[m] = hit.point.z();
    maps.object[m] = hit.object;
    maps.points[m] = hit.point;
  }
  return maps;
}

Histogram histogram(std::span<const double> values, double bin_width) {
  if (!(bin_width > 0.0)) throw Error(ErrorCode::kInvalidArgument, "histogram: bin width must be > 0");
  Histogram h;
  h.bin_width = bin_width;
  h.min_value = std::numeric_limits<double>::infinity();
  h.max_value = -std::numeric_limits<double>::infinity();
  for (double x : values) {
    if (!std::isfinite(x)) continue;
    h.min_value = std::min(h.min_value, x);
    h.max_value = std::max(h.max_value, x);
    ++h.total;
  }
  if (h.total == 0) throw Error(ErrorCode::kEmptyInput, "histogram: no finite values");
  h.origin = std::floor(h.min_value / bin_width) * bin_width;
  const auto n_bins = static_cast<std::size_t>(std::floor((h.max_value - h.origin) / bin_width)) + 1;
  h.counts.assign(n_bins, 0);
  for (double x : values) {
    if (!std::isfinite(x)) continue;
    auto i = static_cast<std::size_t>(std::max(0.0, std::floor((x - h.origin) / bin_width)));
    ++h.counts[std::min(i, n_bins - 1)];
  }
  return h;
}

std::string_view noise_kind_name(NoiseKind k) {
  switch (k) {
    case NoiseKind::kOneHotTruth: return "one_hot_truth";
    case NoiseKind::kGaussianBinBlur: return "gaussian_bin_blur";
    case NoiseKind::kBias: return "bias";
  }
  return "one_hot_truth";
}

NoiseKind parse_noise_kind(std::string_view name) {
  if (name == "one_hot_truth") return NoiseKind::kOneHotTruth;
  if (name == "gaussian_bin_blur") return NoiseKind::kGaussianBinBlur;
  if (name == "bias") return NoiseKind::kBias;
  throw Error(ErrorCode::kConfig, "unknown noise kind '" + std::string(name) + "'");
}

void NoiseModel::validate() const {
  if (!(sigma_bins >= 0.0) || !std::isfinite(sigma_bins)) {
    throw Error(ErrorCode::kInvalidArgument, "noise model: sigma_bins must be >= 0");
  }
  if (!std::isfinite(bias_m)) throw Error(ErrorCode::kInvalidArgument, "noise model: bias must be finite");
}

std::vector<double> predict_bins(double target, const BinSpec& bins, const NoiseModel& noise) {
  std::vector<double> w(static_cast<std::size_t>(bins.n_bins), 0.0);
  switch (noise.kind) {
    case NoiseKind::kOneHotTruth:
      w[static_cast<std::size_t>(value_to_bin(target, bins))] = 1.0;
      break;
    case NoiseKind::kBias:
      w[static_cast<std::size_t>(value_to_bin(target + noise.bias_m, bins))] = 1.0;
      break;
    case NoiseKind::kGaussianBinBlur: {
      const int center = value_to_bin(target, bins);
      if (noise.sigma_bins == 0.0) {
        w[static_cast<std::size_t>(center)] = 1.0;
        break;
      }
      double sum = 0.0;
      const double inv = 1.0 / (2.0 * noise.sigma_bins * noise.sigma_bins);
      for (int j = 0; j < bins.n_bins; ++j) {
        const double dj = j - center;
        w[static_cast<std::size_t>(j)] = std::exp(-dj * dj * inv);
        sum += w[static_cast<std::size_t>(j)];
      }
      for (double& x : w) x /= sum;
      break;
    }
  }
  return w;
}

DistributionMap predict_distribution(std::span<const double> targets, int width, int height,
                                     const BinSpec& bins, const NoiseModel& noise) {
  bins.validate();
  noise.validate();
  DistributionMap dist(width, height, bins.n_bins);
  if (targets.size() != dist.cell_count()) {
    throw Error(ErrorCode::kShapeMismatch, "predict_distribution: target count != width * height");
  }
  const double uniform = 1.0 / bins.n_bins;
  for (std::size_t m = 0; m < targets.size(); ++m) {
    auto cell = dist.cell(m);
    if (std::isnan(targets[m])) {
      std::fill(cell.begin(), cell.end(), uniform);
      dist.valid[m] = 0;
      continue;
    }
    const auto w = predict_bins(targets[m], bins, noise);
    std::copy(w.begin(), w.end(), cell.begin());
  }
  return dist;
}

DistributionMap predict_height_distribution(const PixelMaps& maps, const BinSpec& bins,
                                            const NoiseModel& noise) {
  return predict_distribution(maps.height_above_ground, maps.width, maps.height, bins, noise);
}

DistributionMap predict_depth_distribution(const PixelMaps& maps, const BinSpec& bins,
                                           const NoiseModel& noise) {
  return predict_distribution(maps.depth, maps.width, maps.height, bins, noise);
}

}  // namespace hlift
