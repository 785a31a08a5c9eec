#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "hlift/binning.hpp"
#include "hlift/geometry.hpp"
#include "hlift/lifting.hpp"

namespace hlift {

enum class ObjectClass { kCar, kBus, kPedestrian, kCyclist };

std::string_view class_name(ObjectClass c);
ObjectClass parse_class(std::string_view name);
/// Nominal (length, width, height) in meters.
Vec3 class_dimensions(ObjectClass c);

struct SceneObject {
  ObjectClass cls = ObjectClass::kCar;
  Box3D box;
};

/// Ego-frame XY rectangle. The ground plane exists only inside it; rays that
/// leave it without hitting anything count as sky.
struct Extent2D {
  double x_min = 0.0;
  double x_max = 160.0;
  double y_min = -20.0;
  double y_max = 20.0;

  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

struct Scene {
  std::vector<SceneObject> objects;
  Extent2D extent;
  std::uint64_t rng_seed = 0;

  /// Boxes inside the extent with centers at or above the ground.
  void validate() const;
};

enum class SceneTemplate { kCorridor, kIntersection };

std::string_view template_name(SceneTemplate t);
SceneTemplate parse_template(std::string_view name);

/// Deterministic for a fixed seed; boxes rest on the ground and never overlap
/// in the ground plane. Throws ExtentTooSmall when placement keeps failing.
Scene generate_scene(SceneTemplate templ, int n_boxes, std::uint64_t seed);

/// True when the two yaw-rotated footprints, grown by `margin`, intersect.
bool footprints_overlap(const Box3D& a, const Box3D& b, double margin = 0.0);

enum class HitKind : std::uint8_t { kSky, kGround, kBox };

struct RayHit {
  HitKind kind = HitKind::kSky;
  int object = -1;
  double depth = 0.0;  // camera-frame z of the hit
  Vec3 point = Vec3::Zero();
};

/// Casts camera rays against the ground rectangle and all boxes.
class Raycaster {
 public:
  Raycaster(const Scene& scene, const CameraRig& rig);
  RayHit cast(double u, double v) const;

 private:
  struct PreparedBox {
    Vec3 center;
    Vec3 half;
    double cos_t;
    double sin_t;
  };
  const Scene* scene_;
  Vec3 origin_;
  Mat3 pixel_to_ego_;
  std::vector<PreparedBox> boxes_;
};

struct PixelMaps {
  int width = 0;
  int height = 0;
  int stride = 1;
  std::vector<double> depth;                // NaN for sky
  std::vector<double> height_above_ground;  // NaN for sky
  std::vector<HitKind> kind;
  std::vector<int> object;                  // -1 unless kind == kBox
  std::vector<Vec3> points;                 // ego hit points (zero for sky)

  std::size_t size() const { return depth.size(); }
  Vec2 pixel(std::size_t m) const {
    return cell_to_pixel(static_cast<int>(m / width), static_cast<int>(m % width), stride);
  }
};

/// Samples pixel centers on a `sample_stride` grid (stride 1 = every pixel).
PixelMaps render(const Scene& scene, const CameraRig& rig, int sample_stride);

struct Histogram {
  double origin = 0.0;  // left edge of bin 0, a multiple of bin_width
  double bin_width = 1.0;
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  double min_value = 0.0;
  double max_value = 0.0;

  double spread() const { return max_value - min_value; }
};

/// Counts finite values (NaN sky entries are skipped). Throws EmptyInput.
Histogram histogram(std::span<const double> values, double bin_width);

enum class NoiseKind { kOneHotTruth, kGaussianBinBlur, kBias };

std::string_view noise_kind_name(NoiseKind k);
NoiseKind parse_noise_kind(std::string_view name);

/// Stand-in for a learned per-pixel bin classifier. All kinds are
/// deterministic given the target value; `seed` is carried for provenance.
struct NoiseModel {
  NoiseKind kind = NoiseKind::kOneHotTruth;
  double sigma_bins = 0.0;
  double bias_m = 0.0;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Categorical distribution for one target value. Throws OutOfRange when the
/// (biased) target leaves the bin range.
std::vector<double> predict_bins(double target, const BinSpec& bins, const NoiseModel& noise);

/// Per-cell distributions from per-cell targets; NaN targets become masked
/// cells with a uniform placeholder.
DistributionMap predict_distribution(std::span<const double> targets, int width, int height,
                                     const BinSpec& bins, const NoiseModel& noise);

DistributionMap predict_height_distribution(const PixelMaps& maps, const BinSpec& bins,
                                            const NoiseModel& noise);
DistributionMap predict_depth_distribution(const PixelMaps& maps, const BinSpec& bins,
                                           const NoiseModel& noise);

}  // namespace hlift
