#include "hlift/lifting.hpp"

#include <cmath>
#include <sstream>

#include "hlift/error.hpp"

namespace hlift {

void ContextMap::validate() const {
  if (width < 0 || height < 0 || channels < 0) {
    throw Error(ErrorCode::kShapeMismatch, "context map: negative dimensions");
  }
  if (data.size() != cell_count() * static_cast<std::size_t>(channels)) {
    throw Error(ErrorCode::kShapeMismatch, "context map: data length != width * height * channels");
  }
  for (double x : data) {
    if (!std::isfinite(x)) throw Error(ErrorCode::kInvalidArgument, "context map: non-finite feature");
  }
}

void DistributionMap::validate() const {
  if (width < 0 || height < 0 || n_bins < 1) {
    throw Error(ErrorCode::kShapeMismatch, "distribution map: bad dimensions");
  }
  if (data.size() != cell_count() * static_cast<std::size_t>(n_bins)) {
    throw Error(ErrorCode::kShapeMismatch, "distribution map: data length != width * height * n_bins");
  }
  if (!valid.empty() && valid.size() != cell_count()) {
    throw Error(ErrorCode::kShapeMismatch, "distribution map: mask length != cell count");
  }
  for (std::size_t m = 0; m < cell_count(); ++m) {
    double sum = 0.0;
    for (double w : cell(m)) {
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw Error(ErrorCode::kInvalidArgument, "distribution map: negative or non-finite weight");
      }
      sum += w;
    }
    if (std::abs(sum - 1.0) > 1e-6) {
      std::ostringstream msg;
      msg << "distribution map: cell " << m << " sums to " << sum;
      throw Error(ErrorCode::kInvalidArgument, msg.str());
    }
  }
}

FusedMap::FusedMap(ContextMap context, DistributionMap dist)
    : context_(std::move(context)), dist_(std::move(dist)) {
  if (context_.width != dist_.width || context_.height != dist_.height) {
    std::ostringstream msg;
    msg << "fuse: context " << context_.width << "x" << context_.height << " vs distribution "
        << dist_.width << "x" << dist_.height;
    throw Error(ErrorCode::kShapeMismatch, msg.str());
  }
  context_.validate();
  dist_.validate();
}

std::vector<double> FusedMap::dense() const {
  const std::size_t nb = static_cast<std::size_t>(n_bins());
  const std::size_t nc = static_cast<std::size_t>(channels());
  std::vector<double> out(cell_count() * nb * nc);
  for (std::size_t m = 0; m < cell_count(); ++m) {
    const auto ctx = context_.cell(m);
    const auto w = dist_.cell(m);
    double* dst = out.data() + m * nb * nc;
    for (std::size_t i = 0; i < nb; ++i) {
      for (std::size_t c = 0; c < nc; ++c) dst[i * nc + c] = ctx[c] * w[i];
    }
  }
  return out;
}

FusedMap fuse(ContextMap context, DistributionMap dist) {
  return FusedMap(std::move(context), std::move(dist));
}

std::uint32_t WedgeCloud::add_feature_row(std::span<const double> f) {
  const auto row = static_cast<std::uint32_t>(channels == 0 ? 0 : features.size() / channels);
  features.insert(features.end(), f.begin(), f.end());
  return row;
}

void WedgeCloud::append(const WedgeCloud& other) {
  if (other.channels != channels) {
    throw Error(ErrorCode::kShapeMismatch, "wedge cloud: channel count mismatch on append");
  }
  const auto row_offset = static_cast<std::uint32_t>(channels == 0 ? 0 : features.size() / channels);
  features.insert(features.end(), other.features.begin(), other.features.end());
  positions.insert(positions.end(), other.positions.begin(), other.positions.end());
  weights.insert(weights.end(), other.weights.begin(), other.weights.end());
  for (auto r : other.feature_rows) feature_rows.push_back(r + row_offset);
  horizon_skipped_cells += other.horizon_skipped_cells;
  masked_cells += other.masked_cells;
}

HeightLifter::HeightLifter(const CameraRig& rig)
    : intrinsics_(rig.intrinsics()),
      center_(rig.camera_center()),
      ground_height_(rig.ground_height()) {
  const Mat3 k_inv = rig.intrinsics().matrix().inverse();
  const Mat3 pixel_to_virt = rig.cam_to_virt() * k_inv;
  pixel_to_ego_ = rig.virt_to_ego().rotation * pixel_to_virt;
  ref_y_row_ = pixel_to_virt.row(1).transpose();
}

LiftResult HeightLifter::lift(double u, double v, double h) const {
  if (!intrinsics_.contains(u, v)) return {Vec3::Zero(), LiftStatus::kOutsideImage};
  if (!(h < ground_height_)) return {Vec3::Zero(), LiftStatus::kAboveCamera};
  const double y = ref_y(u, v);
  if (!(y > kHorizonEpsilon)) return {Vec3::Zero(), LiftStatus::kHorizonRay};
  return {lift_unchecked(ray_ego(u, v), y, h), LiftStatus::kOk};
}

LiftResult try_lift_pixel_height(double u, double v, double h, const CameraRig& rig) {
  return HeightLifter(rig).lift(u, v, h);
}

Vec3 lift_pixel_height(double u, double v, double h, const CameraRig& rig) {
  const LiftResult r = try_lift_pixel_height(u, v, h, rig);
  switch (r.status) {
    case LiftStatus::kOk:
      return r.point;
    case LiftStatus::kOutsideImage:
      throw Error(ErrorCode::kOutOfRange, "lift_pixel_height: pixel outside image");
    case LiftStatus::kAboveCamera:
      throw Error(ErrorCode::kAboveCamera, "lift_pixel_height: height at or above the camera");
    case LiftStatus::kHorizonRay:
      throw Error(ErrorCode::kHorizonRay, "lift_pixel_height: ray does not descend below the horizon");
  }
  return r.point;
}

Vec3 lift_pixel_depth(double u, double v, double d, const CameraRig& rig) {
  if (!(d > 0.0)) throw Error(ErrorCode::kNonPositiveDepth, "lift_pixel_depth: depth must be > 0");
  if (!rig.intrinsics().contains(u, v)) {
    throw Error(ErrorCode::kOutOfRange, "lift_pixel_depth: pixel outside image");
  }
  return rig.cam_to_ego().apply(d * pixel_to_ref_cam(u, v, rig.intrinsics()));
}

namespace {

void check_grid_fits(const FusedMap& fused, const CameraRig& rig, int stride) {
  if (stride < 1) throw Error(ErrorCode::kInvalidArgument, "pixel stride must be >= 1");
  const auto& k = rig.intrinsics();
  if (static_cast<long>(fused.width()) * stride > k.image_w ||
      static_cast<long>(fused.height()) * stride > k.image_h) {
    throw Error(ErrorCode::kShapeMismatch, "feature grid * stride exceeds the image size");
  }
}

}  // namespace

WedgeCloud build_wedge(const FusedMap& fused, const BinSpec& bins, const CameraRig& rig, int pixel_stride) {
  if (!bins.is_height()) {
    throw Error(ErrorCode::kInvalidArgument, "build_wedge needs a height bin strategy");
  }
  if (bins.n_bins != fused.n_bins()) {
    throw Error(ErrorCode::kShapeMismatch, "build_wedge: bin count differs from distribution");
  }
  check_grid_fits(fused, rig, pixel_stride);
  const std::vector<double> heights = bin_values(bins);
  const HeightLifter lifter(rig);
  if (!(heights.back() < lifter.ground_height())) {
    throw Error(ErrorCode::kAboveCamera, "build_wedge: height bins reach the camera height");
  }

  WedgeCloud cloud;
  cloud.channels = fused.channels();
  cloud.source_rig_id = rig.id();
  cloud.positions.reserve(fused.cell_count() * heights.size());
  cloud.weights.reserve(fused.cell_count() * heights.size());
  cloud.feature_rows.reserve(fused.cell_count() * heights.size());

  const auto& dist = fused.distribution();
  for (int r = 0; r < fused.height(); ++r) {
    for (int c = 0; c < fused.width(); ++c) {
      const std::size_t m = static_cast<std::size_t>(r) * fused.width() + c;
      if (!dist.is_valid(m)) {
        ++cloud.masked_cells;
        continue;
      }
      const Vec2 px = cell_to_pixel(r, c, pixel_stride);
      const double y = lifter.ref_y(px.x(), px.y());
      if (!(y > kHorizonEpsilon)) {
        ++cloud.horizon_skipped_cells;
        continue;
      }
      const Vec3 ray = lifter.ray_ego(px.x(), px.y());
      const auto row = cloud.add_feature_row(fused.context().cell(m));
      const auto w = dist.cell(m);
      for (std::size_t i = 0; i < heights.size(); ++i) {
        cloud.add_point(lifter.lift_unchecked(ray, y, heights[i]), w[i], row);
      }
    }
  }
  return cloud;
}

WedgeCloud build_wedge_depth(const FusedMap& fused, const BinSpec& bins, const CameraRig& rig, int pixel_stride) {
  if (bins.strategy != BinStrategy::kDepthUniform) {
    throw Error(ErrorCode::kInvalidArgument, "build_wedge_depth needs a DEPTH_UD bin spec");
  }
  if (bins.n_bins != fused.n_bins()) {
    throw Error(ErrorCode::kShapeMismatch, "build_wedge_depth: bin count differs from distribution");
  }
  check_grid_fits(fused, rig, pixel_stride);
  const std::vector<double> depths = bin_values(bins);
  const Mat3 k_inv = rig.intrinsics().matrix().inverse();
  const Mat3 pixel_to_ego = rig.cam_to_ego().rotation * k_inv;
  const Vec3 center = rig.camera_center();

  WedgeCloud cloud;
  cloud.channels = fused.channels();
  cloud.source_rig_id = rig.id();
  cloud.positions.reserve(fused.cell_count() * depths.size());
  cloud.weights.reserve(fused.cell_count() * depths.size());
  cloud.feature_rows.reserve(fused.cell_count() * depths.size());

  const auto& dist = fused.distribution();
  for (int r = 0; r < fused.height(); ++r) {
    for (int c = 0; c < fused.width(); ++c) {
      const std::size_t m = static_cast<std::size_t>(r) * fused.width() + c;
      if (!dist.is_valid(m)) {
        ++cloud.masked_cells;
        continue;
      }
      const Vec2 px = cell_to_pixel(r, c, pixel_stride);
      const Vec3 ray = pixel_to_ego * Vec3(px.x(), px.y(), 1.0);
      const auto row = cloud.add_feature_row(fused.context().cell(m));
      const auto w = dist.cell(m);
      for (std::size_t i = 0; i < depths.size(); ++i) {
        cloud.add_point(center + depths[i] * ray, w[i], row);
      }
    }
  }
  return cloud;
}

}  // namespace hlift
