#include "hlift/geometry.hpp"

#include <cmath>
#include <sstream>

#include "hlift/error.hpp"

namespace hlift {

namespace {
constexpr double kOrthoTol = 1e-9;
constexpr double kDegenerateAngle = 1e-6;
}  // namespace

void Intrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "intrinsics: focal lengths must be positive");
  }
  if (image_w <= 0 || image_h <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "intrinsics: image size must be positive");
  }
  if (!(cx >= 0.0 && cx < image_w && cy >= 0.0 && cy < image_h)) {
    throw Error(ErrorCode::kInvalidArgument, "intrinsics: principal point outside image");
  }
}

Mat3 Intrinsics::matrix() const {
  Mat3 k;
  k << fx, 0.0, cx, 0.0, fy, cy, 0.0, 0.0, 1.0;
  return k;
}

RigidTransform RigidTransform::inverse() const {
  const Mat3 rt = rotation.transpose();
  return {rt, -(rt * translation)};
}

void Extrinsics::validate() const {
  if (!rotation.allFinite() || !translation.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "extrinsics: non-finite entries");
  }
  const double ortho_err = (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
  if (ortho_err > kOrthoTol) {
    std::ostringstream msg;
    msg << "extrinsics: rotation is not orthonormal (max deviation " << ortho_err << ")";
    throw Error(ErrorCode::kInvalidArgument, msg.str());
  }
  if (std::abs(rotation.determinant() - 1.0) > kOrthoTol) {
    throw Error(ErrorCode::kInvalidArgument, "extrinsics: rotation determinant is not +1");
  }
}

Mat3 rotation_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << 1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c;
  return r;
}

Mat3 rotation_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c;
  return r;
}

Mat3 rotation_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 r;
  r << c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0;
  return r;
}

Extrinsics extrinsics_from_pose(const CameraPose& pose) {
  // Columns: camera x, y, z axes in ego coordinates for a level camera looking along +x.
  Mat3 base;
  base << 0.0, 0.0, 1.0,
         -1.0, 0.0, 0.0,
          0.0, -1.0, 0.0;
  const Mat3 cam_to_ego =
      rotation_z(pose.yaw) * base * rotation_x(-pose.pitch_down) * rotation_z(pose.roll);
  Extrinsics e;
  e.rotation = cam_to_ego.transpose();
  e.translation = -(e.rotation * pose.position);
  return e;
}

VirtualFrame build_virtual_frame(const Extrinsics& extrinsics, const Vec3& ground_normal_ego) {
  extrinsics.validate();
  const double n_norm = ground_normal_ego.norm();
  if (std::abs(n_norm - 1.0) > 1e-9) {
    throw Error(ErrorCode::kInvalidArgument, "ground normal must be unit length");
  }
  const Vec3& n = ground_normal_ego;
  const Vec3 center = extrinsics.camera_center();
  const double height = n.dot(center);
  if (!(height > 0.0)) {
    throw Error(ErrorCode::kCameraBelowGround, "camera center is not above the ground plane");
  }

  const Mat3 cam_to_ego = extrinsics.rotation.transpose();
  const Vec3 optical_axis = cam_to_ego.col(2);
  const Vec3 projected = optical_axis - optical_axis.dot(n) * n;
  if (projected.norm() < std::sin(kDegenerateAngle)) {
    throw Error(ErrorCode::kDegenerateOrientation,
                "optical axis is parallel to the ground normal; virtual frame undefined");
  }

  const Vec3 axis_y = -n;
  const Vec3 axis_z = projected.normalized();
  const Vec3 axis_x = axis_y.cross(axis_z);

  Mat3 virt_to_ego_rot;
  virt_to_ego_rot.col(0) = axis_x;
  virt_to_ego_rot.col(1) = axis_y;
  virt_to_ego_rot.col(2) = axis_z;

  VirtualFrame frame;
  frame.virt_to_ego = {virt_to_ego_rot, center};
  frame.cam_to_virt = virt_to_ego_rot.transpose() * cam_to_ego;
  frame.ground_height = height;
  return frame;
}

CameraRig::CameraRig(const Intrinsics& intrinsics, const Extrinsics& extrinsics, std::string id)
    : intrinsics_(intrinsics), extrinsics_(extrinsics), id_(std::move(id)) {
  intrinsics_.validate();
  frame_ = build_virtual_frame(extrinsics_);
  cam_to_ego_ = extrinsics_.camera_to_ego();
}

std::optional<PixelProjection> CameraRig::project(const Vec3& ego) const {
  const Vec3 cam = to_camera(ego);
  if (!(cam.z() > 0.0)) return std::nullopt;
  return PixelProjection{intrinsics_.fx * cam.x() / cam.z() + intrinsics_.cx,
                         intrinsics_.fy * cam.y() / cam.z() + intrinsics_.cy, cam.z()};
}

double normalize_angle(double theta) {
  double t = std::fmod(theta + kPi, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  t -= kPi;
  // fmod can land exactly on +pi after rounding.
  if (t >= kPi) t -= 2.0 * kPi;
  return t;
}

void Box3D::validate() const {
  if (!(l > 0.0 && w > 0.0 && h > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "box dimensions must be positive");
  }
  if (!(theta >= -kPi && theta < kPi)) {
    throw Error(ErrorCode::kInvalidArgument, "box yaw must lie in [-pi, pi)");
  }
}

}  // namespace hlift
