#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hlift/binning.hpp"
#include "hlift/geometry.hpp"

namespace hlift {

/// Rays whose virtual-frame y on the reference plane is at or below this
/// value never reach a height below the camera.
constexpr double kHorizonEpsilon = 1e-6;

/// Per-cell context features, row-major cells, channels innermost.
struct ContextMap {
  int width = 0;
  int height = 0;
  int channels = 0;
  std::vector<double> data;

  ContextMap() = default;
  ContextMap(int w, int h, int c) : width(w), height(h), channels(c), data(cell_count() * c, 0.0) {}

  std::size_t cell_count() const { return static_cast<std::size_t>(width) * height; }
  std::span<const double> cell(std::size_t m) const { return {data.data() + m * channels, static_cast<std::size_t>(channels)}; }
  std::span<double> cell(std::size_t m) { return {data.data() + m * channels, static_cast<std::size_t>(channels)}; }
  void validate() const;
};

/// Per-cell categorical distribution over bins. Cells with valid[m] == 0
/// (sky) carry a placeholder uniform distribution and are skipped when lifting.
struct DistributionMap {
  int width = 0;
  int height = 0;
  int n_bins = 0;
  std::vector<double> data;
  std::vector<std::uint8_t> valid;

  DistributionMap() = default;
  DistributionMap(int w, int h, int n)
      : width(w), height(h), n_bins(n), data(cell_count() * n, 0.0), valid(cell_count(), 1) {}

  std::size_t cell_count() const { return static_cast<std::size_t>(width) * height; }
  std::span<const double> cell(std::size_t m) const { return {data.data() + m * n_bins, static_cast<std::size_t>(n_bins)}; }
  std::span<double> cell(std::size_t m) { return {data.data() + m * n_bins, static_cast<std::size_t>(n_bins)}; }
  bool is_valid(std::size_t m) const { return valid.empty() || valid[m] != 0; }
  /// Weights must be non-negative and sum to 1 within 1e-6 in every cell.
  void validate() const;
};

/// Outer product of context and distribution, kept in factored form:
/// at(m, i, c) == context[m][c] * dist[m][i]. dense() materializes it.
class FusedMap {
 public:
  FusedMap(ContextMap context, DistributionMap dist);

  int width() const { return context_.width; }
  int height() const { return context_.height; }
  int channels() const { return context_.channels; }
  int n_bins() const { return dist_.n_bins; }
  std::size_t cell_count() const { return context_.cell_count(); }

  double at(std::size_t cell, int bin, int channel) const {
    return context_.data[cell * channels() + channel] * dist_.data[cell * n_bins() + bin];
  }
  /// Layout [cell][bin][channel].
  std::vector<double> dense() const;

  const ContextMap& context() const { return context_; }
  const DistributionMap& distribution() const { return dist_; }

 private:
  ContextMap context_;
  DistributionMap dist_;
};

/// Throws ShapeMismatch when the two maps disagree on width/height.
FusedMap fuse(ContextMap context, DistributionMap dist);

/// Pseudo point cloud lifted from one image. Points reference shared feature
/// rows so a cell's context vector is stored once for all of its bins.
struct WedgeCloud {
  int channels = 0;
  std::vector<Vec3> positions;
  std::vector<double> weights;
  std::vector<std::uint32_t> feature_rows;
  std::vector<double> features;
  std::string source_rig_id;
  std::size_t horizon_skipped_cells = 0;
  std::size_t masked_cells = 0;

  std::size_t size() const { return positions.size(); }
  std::span<const double> feature(std::size_t point) const {
    return {features.data() + static_cast<std::size_t>(feature_rows[point]) * channels,
            static_cast<std::size_t>(channels)};
  }
  std::uint32_t add_feature_row(std::span<const double> f);
  void add_point(const Vec3& p, double weight, std::uint32_t row) {
    positions.push_back(p);
    weights.push_back(weight);
    feature_rows.push_back(row);
  }
  /// Appends all points of `other` (features re-indexed). Channel counts must match.
  void append(const WedgeCloud& other);
};

enum class LiftStatus { kOk, kHorizonRay, kAboveCamera, kOutsideImage };

struct LiftResult {
  Vec3 point = Vec3::Zero();
  LiftStatus status = LiftStatus::kOk;
  bool ok() const { return status == LiftStatus::kOk; }
};

/// Precomputed height lifting for one rig:
///   P_ego = T_virt->ego * ((H - h) / y_ref) * T_cam->virt * K^-1 [u, v, 1]^T
class HeightLifter {
 public:
  explicit HeightLifter(const CameraRig& rig);

  /// y of the reference-plane point in the virtual frame.
  double ref_y(double u, double v) const { return ref_y_row_.dot(Vec3(u, v, 1.0)); }
  LiftResult lift(double u, double v, double h) const;
  /// Skips the horizon/image checks; caller guarantees ref_y > kHorizonEpsilon.
  Vec3 lift_unchecked(const Vec3& ray_ego, double ref_y, double h) const {
    return center_ + ((ground_height_ - h) / ref_y) * ray_ego;
  }
  /// Ego-frame direction of K^-1 [u, v, 1]^T (camera depth 1).
  Vec3 ray_ego(double u, double v) const { return pixel_to_ego_ * Vec3(u, v, 1.0); }
  double ground_height() const { return ground_height_; }

 private:
  Intrinsics intrinsics_;
  Mat3 pixel_to_ego_;  // R_virt->ego * R_cam->virt * K^-1
  Vec3 ref_y_row_;     // second row of R_cam->virt * K^-1
  Vec3 center_;
  double ground_height_;
};

/// Throws HorizonRay, AboveCamera, or OutOfRange (pixel outside image).
Vec3 lift_pixel_height(double u, double v, double h, const CameraRig& rig);
LiftResult try_lift_pixel_height(double u, double v, double h, const CameraRig& rig);

/// Camera -> ego of d * K^-1 [u, v, 1]^T. Throws NonPositiveDepth.
Vec3 lift_pixel_depth(double u, double v, double d, const CameraRig& rig);

/// Feature cell (row, col) maps to pixel center ((col + .5) * stride, (row + .5) * stride).
inline Vec2 cell_to_pixel(int row, int col, double stride) {
  return {(col + 0.5) * stride, (row + 0.5) * stride};
}

/// Lifts every valid cell at every height bin (row-major cells, ascending bin).
/// Horizon cells are skipped and counted, never raised.
WedgeCloud build_wedge(const FusedMap& fused, const BinSpec& bins, const CameraRig& rig, int pixel_stride);

/// Depth baseline: lifts every valid cell at every DEPTH_UD bin.
WedgeCloud build_wedge_depth(const FusedMap& fused, const BinSpec& bins, const CameraRig& rig, int pixel_stride);

}  // namespace hlift
