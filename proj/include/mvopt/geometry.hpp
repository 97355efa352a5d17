// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <optional>

#include "mvopt/errors.hpp"

namespace mvopt {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat3 = Eigen::Matrix3d;

/// Pinhole camera: fx, fy, cx, cy in pixels, image size in pixels.
/// Pixel centers sit at integer coordinates (no half-pixel offset).
struct CameraIntrinsics {
  double fx = 0, fy = 0, cx = 0, cy = 0;
  int width = 0, height = 0;

  CameraIntrinsics() = default;
  CameraIntrinsics(double fx_, double fy_, double cx_, double cy_, int w, int h);

  /// Intrinsics of the same camera downsampled by an integer factor
  /// (focal lengths and principal point divided, dimensions floor-divided).
  CameraIntrinsics downsampled(int factor) const;

  bool contains(double u, double v) const {
    return u >= 0.0 && v >= 0.0 && u <= width - 1.0 && v <= height - 1.0;
  }
};

/// Rigid world-to-camera transform: p_cam = R * p_world + t.
/// The inverse map p_world = R^T (p_cam - t) is what cam_to_world computes.
class PoseSE3 {
 public:
  PoseSE3() : rotation_(Mat3::Identity()), translation_(Vec3::Zero()) {}

  /// Validates orthonormality (R^T R = I, det R = +1, both within 1e-9).
  PoseSE3(const Mat3& rotation, const Vec3& translation);

  static PoseSE3 identity() { return PoseSE3(); }

  /// Builds from a unit quaternion (normalized on entry) and translation.
  static PoseSE3 from_quaternion(const Eigen::Quaterniond& q, const Vec3& t);

  const Mat3& rotation() const { return rotation_; }
  const Vec3& translation() const { return translation_; }

  Vec3 world_to_cam(const Vec3& p_world) const { return rotation_ * p_world + translation_; }
  Vec3 cam_to_world(const Vec3& p_cam) const { return rotation_.transpose() * (p_cam - translation_); }

  /// Camera center in world coordinates: -R^T t.
  Vec3 center() const { return -(rotation_.transpose() * translation_); }

  /// Optical axis direction in world coordinates (camera +z).
  Vec3 view_direction() const { return rotation_.row(2).transpose(); }

  PoseSE3 inverse() const;

  /// Composition: (a * b).world_to_cam(p) == a.world_to_cam(b.world_to_cam(p)).
  PoseSE3 operator*(const PoseSE3& rhs) const;

  Eigen::Matrix4d matrix() const;

 private:
  struct Unchecked {};
  PoseSE3(const Mat3& r, const Vec3& t, Unchecked) : rotation_(r), translation_(t) {}

  Mat3 rotation_;
  Vec3 translation_;
};

/// Ray o + t*d with a unit direction and a valid [t_near, t_far] interval.
struct Ray {
  Vec3 origin = Vec3::Zero();
  Vec3 direction = Vec3::UnitZ();
  double t_near = 0.1;
  double t_far = 10.0;

  Ray() = default;
  Ray(const Vec3& o, const Vec3& d, double tn, double tf);

  Vec3 at(double t) const { return origin + t * direction; }
};

struct PixelDepth {
  double u = 0, v = 0;
  double depth = 0;
};

/// Back-projects a pixel at the given metric depth into the camera frame.
/// Throws InvalidInputError for non-positive or non-finite depth.
Vec3 unproject(double u, double v, double depth, const CameraIntrinsics& K);

/// Projects a camera-frame point to pixel coordinates. Returns nullopt for
/// points at or behind the camera plane (p_z <= 0): unusable, not an error.
std::optional<PixelDepth> project(const Vec3& p_cam, const CameraIntrinsics& K);

/// The camera ray through pixel (u, v), in world coordinates.
Ray camera_ray(double u, double v, const CameraIntrinsics& K, const PoseSE3& pose,
               double t_near, double t_far);

/// SE(3) exponential: twist = [translation; rotation] tangent vector.
PoseSE3 se3_exp(const Vec6& twist);

/// SE(3) logarithm, inverse of se3_exp away from the rotation cut locus.
Vec6 se3_log(const PoseSE3& pose);

/// Rotation angle of R in radians.
double rotation_angle(const Mat3& rotation);

}  // namespace mvopt
