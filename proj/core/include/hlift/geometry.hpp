#pragma once

#include <optional>
#include <string>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace hlift {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Ego frame: z-up, ground plane z = 0.
// Camera frame: x right, y down, z along the optical axis.

struct Intrinsics {
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;
  int image_w = 0;
  int image_h = 0;

  /// Throws InvalidArgument unless fx, fy > 0 and the principal point lies in the image.
  void validate() const;
  Mat3 matrix() const;
  bool contains(double u, double v) const {
    return u >= 0.0 && v >= 0.0 && u <= image_w && v <= image_h;
  }
};

/// Rotation plus translation acting as p -> R p + t.
struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  static RigidTransform identity() { return {}; }
  static RigidTransform pure_rotation(const Mat3& r) { return {r, Vec3::Zero()}; }

  Vec3 apply(const Vec3& p) const { return rotation * p + translation; }
  RigidTransform inverse() const;

  /// (a * b).apply(p) == a.apply(b.apply(p))
  friend RigidTransform operator*(const RigidTransform& a, const RigidTransform& b) {
    return {a.rotation * b.rotation, a.rotation * b.translation + a.translation};
  }
};

inline Vec3 transform_point(const RigidTransform& t, const Vec3& p) { return t.apply(p); }
inline Vec3 transform_point(const Mat3& r, const Vec3& p) { return r * p; }

/// Ego -> camera: p_cam = rotation * p_ego + translation.
struct Extrinsics {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  /// Throws InvalidArgument unless rotation is orthonormal with det +1 (1e-9).
  void validate() const;
  Vec3 camera_center() const { return -rotation.transpose() * translation; }
  RigidTransform ego_to_camera() const { return {rotation, translation}; }
  RigidTransform camera_to_ego() const { return ego_to_camera().inverse(); }
};

/// Convenience pose description for building extrinsics by hand.
/// yaw rotates the viewing direction about ego +z (0 looks along ego +x),
/// pitch_down tilts the optical axis toward the ground, roll spins about
/// the optical axis. Angles in radians.
struct CameraPose {
  Vec3 position = Vec3(0.0, 0.0, 5.0);
  double yaw = 0.0;
  double pitch_down = 0.0;
  double roll = 0.0;
};

Extrinsics extrinsics_from_pose(const CameraPose& pose);

/// Ground-aligned frame sharing the camera origin. Y points toward the
/// ground, Z is the optical axis projected onto the ground plane.
struct VirtualFrame {
  Mat3 cam_to_virt = Mat3::Identity();
  RigidTransform virt_to_ego;
  double ground_height = 0.0;
};

/// Throws DegenerateOrientation when the optical axis is within 1e-6 rad of
/// the ground normal, CameraBelowGround when the camera is not above z = 0.
VirtualFrame build_virtual_frame(const Extrinsics& extrinsics,
                                 const Vec3& ground_normal_ego = Vec3::UnitZ());

/// K^-1 [u, v, 1]^T; the returned point sits on the depth-1 reference plane.
inline Vec3 pixel_to_ref_cam(double u, double v, const Intrinsics& k) {
  return {(u - k.cx) / k.fx, (v - k.cy) / k.fy, 1.0};
}

struct PixelProjection {
  double u = 0.0;
  double v = 0.0;
  double depth = 0.0;  // camera-frame z
};

class CameraRig {
 public:
  CameraRig(const Intrinsics& intrinsics, const Extrinsics& extrinsics, std::string id = {});

  const Intrinsics& intrinsics() const { return intrinsics_; }
  const Extrinsics& extrinsics() const { return extrinsics_; }
  const std::string& id() const { return id_; }

  const Mat3& cam_to_virt() const { return frame_.cam_to_virt; }
  const RigidTransform& virt_to_ego() const { return frame_.virt_to_ego; }
  const RigidTransform& cam_to_ego() const { return cam_to_ego_; }
  double ground_height() const { return frame_.ground_height; }
  Vec3 camera_center() const { return cam_to_ego_.translation; }

  /// Camera-frame point of an ego point.
  Vec3 to_camera(const Vec3& ego) const { return extrinsics_.ego_to_camera().apply(ego); }

  /// Pinhole projection; empty when the point is not in front of the camera.
  std::optional<PixelProjection> project(const Vec3& ego) const;

 private:
  Intrinsics intrinsics_;
  Extrinsics extrinsics_;
  std::string id_;
  VirtualFrame frame_;
  RigidTransform cam_to_ego_;
};

/// Seven-parameter box: ego center, size, yaw about ego z.
struct Box3D {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double l = 1.0;
  double w = 1.0;
  double h = 1.0;
  double theta = 0.0;

  Vec3 center() const { return {x, y, z}; }
  double top() const { return z + 0.5 * h; }
  void validate() const;
};

/// Maps an angle into [-pi, pi).
double normalize_angle(double theta);

Mat3 rotation_x(double angle);
Mat3 rotation_y(double angle);
Mat3 rotation_z(double angle);

constexpr double kPi = 3.14159265358979323846;
constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }

}  // namespace hlift
