#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "hlift/binning.hpp"
#include "hlift/geometry.hpp"
#include "hlift/scene.hpp"

namespace hlift {

/// Default standard deviation of roll/pitch offsets, degrees.
constexpr double kDefaultDisturbanceSigmaDeg = 1.67;

struct DisturbanceSpec {
  double sigma_roll_deg = kDefaultDisturbanceSigmaDeg;
  double sigma_pitch_deg = kDefaultDisturbanceSigmaDeg;
  std::uint64_t seed = 0;
  int n_trials = 1;

  void validate() const;
};

struct Disturbance {
  double roll_deg = 0.0;
  double pitch_deg = 0.0;
};

/// Rotates the camera about its own optical (roll) and lateral (pitch) axes.
/// The camera center stays where it is mounted. Positive pitch tilts the
/// optical axis toward the ground.
Extrinsics perturb_extrinsics(const Extrinsics& extrinsics, double roll_deg, double pitch_deg);
CameraRig perturb_rig(const CameraRig& rig, const Disturbance& d);

/// Trial k draws (roll, pitch) from its own substream of spec.seed.
std::vector<Disturbance> sample_disturbances(const DisturbanceSpec& spec);

struct OverlapBins {
  double v_px = 16.0;
  double depth_m = 2.0;
  double height_m = 0.1;
};

struct ScatterPoint {
  double v = 0.0;
  double value = 0.0;
};

/// Normalized 2D histogram intersection in [0, 1]; 1 for identical
/// distributions. Returns 0 if either set is empty.
double histogram_intersection(const std::vector<ScatterPoint>& a, const std::vector<ScatterPoint>& b,
                              double v_bin, double value_bin);

struct TrialOverlap {
  int trial = 0;
  Disturbance disturbance;
  double overlap_depth = 0.0;
  double overlap_height = 0.0;
  std::size_t n_points = 0;
};

struct OverlapReport {
  std::vector<TrialOverlap> trials;
  double overlap_depth = 0.0;   // mean over trials
  double overlap_height = 0.0;  // mean over trials
  std::size_t n_points = 0;     // objects visible to the clean rig
  OverlapBins bins;
};

/// Per-object (v, depth) and (v, height) scatter of box centers for the clean
/// rig versus each perturbed rig. Throws NoVisibleObjects.
OverlapReport scatter_overlap(const Scene& scene, const CameraRig& rig, const DisturbanceSpec& spec,
                              const OverlapBins& bins = {});

enum class Parameterization { kHeight, kDepth };
std::string_view parameterization_name(Parameterization p);

struct ObjectError {
  int trial = -1;  // -1: undisturbed
  int object = 0;
  Parameterization param = Parameterization::kHeight;
  double distance_error = 0.0;  // | |est - cam| - |truth - cam| |
  double center_error = 0.0;    // |est - truth|
  double true_distance = 0.0;
  std::size_t n_pixels = 0;
};

struct ErrorSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double median = 0.0;
  double p90 = 0.0;
};

/// Nearest-rank statistics. Empty input gives a zero summary.
ErrorSummary summarize(std::vector<double> values);

struct ErrorReport {
  std::vector<ObjectError> rows;
  ErrorSummary height;
  ErrorSummary depth;
  double camera_height = 0.0;
  bool disturbed = false;
  std::size_t skipped_pixels = 0;

  void finalize();  // recomputes the summaries from rows
  void merge(const ErrorReport& other);
};

struct LocalizationSetup {
  BinSpec height_bins;
  BinSpec depth_bins;
  NoiseModel noise;
  int render_stride = 4;
};

/// Renders the scene from the (possibly disturbed) camera, predicts per-pixel
/// height and depth distributions, lifts every object pixel with the observing
/// camera's geometry and compares weighted centroids against the centroid of
/// the true surface points.
///
/// Predictions are conditioned on the world-invariant truth and on the
/// calibration the predictor was fit to (the undisturbed rig): the height
/// target is the surface height, the depth target is the depth that the
/// undisturbed rig associates with that pixel and height. Without a
/// disturbance both targets equal the rendered truth.
ErrorReport localization_error(const Scene& scene, const CameraRig& rig, const LocalizationSetup& setup,
                               const std::optional<Disturbance>& disturbance, int trial = -1);

/// Runs localization_error for every sampled disturbance and merges the rows.
ErrorReport localization_study(const Scene& scene, const CameraRig& rig, const LocalizationSetup& setup,
                               const DisturbanceSpec& spec);

/// Ground-range shift of a lifted point when the height h is mispredicted as
/// h + delta_h, for a point at ground range d seen from camera height H:
/// d * delta_h / (H - h). Throws InvalidGeometry unless H > h + delta_h and d > 0.
double height_error_law(double d_ground_range, double delta_h, double camera_height, double h);

}  // namespace hlift
