// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#include "mvopt/geometry.hpp"

#include <cmath>

namespace mvopt {

CameraIntrinsics::CameraIntrinsics(double fx_, double fy_, double cx_, double cy_, int w, int h)
    : fx(fx_), fy(fy_), cx(cx_), cy(cy_), width(w), height(h) {
  if (!(fx > 0.0) || !(fy > 0.0)) throw InvalidInputError("intrinsics: focal lengths must be positive");
  if (width <= 0 || height <= 0) throw InvalidInputError("intrinsics: image size must be positive");
  if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
    throw InvalidInputError("intrinsics: principal point outside image");
}

CameraIntrinsics CameraIntrinsics::downsampled(int factor) const {
  if (factor < 1) throw InvalidInputError("intrinsics: downsample factor must be >= 1");
  const double f = static_cast<double>(factor);
  return CameraIntrinsics(fx / f, fy / f, cx / f, cy / f, width / factor, height / factor);
}

PoseSE3::PoseSE3(const Mat3& rotation, const Vec3& translation)
    : rotation_(rotation), translation_(translation) {
  const Mat3 rtr = rotation_.transpose() * rotation_;
  if ((rtr - Mat3::Identity()).cwiseAbs().maxCoeff() > 1e-9)
    throw InvalidInputError("pose: rotation is not orthonormal");
  if (std::abs(rotation_.determinant() - 1.0) > 1e-9)
    throw InvalidInputError("pose: rotation determinant is not +1");
}

PoseSE3 PoseSE3::from_quaternion(const Eigen::Quaterniond& q, const Vec3& t) {
  Eigen::Quaterniond qn = q.normalized();
  return PoseSE3(qn.toRotationMatrix(), t, Unchecked{});
}

PoseSE3 PoseSE3::inverse() const {
  return PoseSE3(rotation_.transpose(), -(rotation_.transpose() * translation_), Unchecked{});
}

PoseSE3 PoseSE3::operator*(const PoseSE3& rhs) const {
  // Re-orthonormalize through a quaternion so long chains keep the invariant.
  Eigen::Quaterniond q(rotation_ * rhs.rotation_);
  q.normalize();
  return PoseSE3(q.toRotationMatrix(), rotation_ * rhs.translation_ + translation_, Unchecked{});
}

Eigen::Matrix4d PoseSE3::matrix() const {
  Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
  m.topLeftCorner<3, 3>() = rotation_;
  m.topRightCorner<3, 1>() = translation_;
  return m;
}

Ray::Ray(const Vec3& o, const Vec3& d, double tn, double tf)
    : origin(o), direction(d), t_near(tn), t_far(tf) {
  if (std::abs(direction.norm() - 1.0) > 1e-9) throw InvalidInputError("ray: direction must be unit length");
  if (!(t_near > 0.0 && t_near < t_far)) throw InvalidInputError("ray: need 0 < t_near < t_far");
}

Vec3 unproject(double u, double v, double depth, const CameraIntrinsics& K) {
  if (!(depth > 0.0) || !std::isfinite(depth))
    throw InvalidInputError("unproject: depth must be positive and finite");
  return Vec3((u - K.cx) * depth / K.fx, (v - K.cy) * depth / K.fy, depth);
}

std::optional<PixelDepth> project(const Vec3& p_cam, const CameraIntrinsics& K) {
  if (!(p_cam.z() > 0.0)) return std::nullopt;
  PixelDepth out;
  out.u = K.fx * p_cam.x() / p_cam.z() + K.cx;
  out.v = K.fy * p_cam.y() / p_cam.z() + K.cy;
  out.depth = p_cam.z();
  return out;
}

Ray camera_ray(double u, double v, const CameraIntrinsics& K, const PoseSE3& pose,
               double t_near, double t_far) {
  const Vec3 dir_cam((u - K.cx) / K.fx, (v - K.cy) / K.fy, 1.0);
  const Vec3 origin = pose.center();
  Vec3 dir_world = pose.rotation().transpose() * dir_cam;
  dir_world.normalize();
  return Ray(origin, dir_world, t_near, t_far);
}

namespace {

Mat3 skew(const Vec3& w) {
  Mat3 s;
  s << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return s;
}

}  // namespace

PoseSE3 se3_exp(const Vec6& twist) {
  const Vec3 v = twist.head<3>();
  const Vec3 w = twist.tail<3>();
  const double theta = w.norm();
  const Mat3 wx = skew(w);

  Mat3 rotation, V;
  if (theta < 1e-10) {
    rotation = Mat3::Identity() + wx + 0.5 * wx * wx;
    V = Mat3::Identity() + 0.5 * wx;
  } else {
    const double s = std::sin(theta), c = std::cos(theta);
    rotation = Mat3::Identity() + (s / theta) * wx + ((1.0 - c) / (theta * theta)) * wx * wx;
    V = Mat3::Identity() + ((1.0 - c) / (theta * theta)) * wx +
        ((theta - s) / (theta * theta * theta)) * wx * wx;
  }
  Eigen::Quaterniond q(rotation);
  q.normalize();
  return PoseSE3::from_quaternion(q, V * v);
}

Vec6 se3_log(const PoseSE3& pose) {
  const Mat3& R = pose.rotation();
  const double cos_theta = std::min(1.0, std::max(-1.0, (R.trace() - 1.0) * 0.5));
  const double theta = std::acos(cos_theta);

  Vec3 w;
  if (theta < 1e-10) {
    w << 0.5 * (R(2, 1) - R(1, 2)), 0.5 * (R(0, 2) - R(2, 0)), 0.5 * (R(1, 0) - R(0, 1));
  } else if (theta > M_PI - 1e-6) {
    // Near the cut locus: extract the axis from the symmetric part.
    Mat3 A = 0.5 * (R + Mat3::Identity());
    Vec3 axis(std::sqrt(std::max(0.0, A(0, 0))), std::sqrt(std::max(0.0, A(1, 1))),
              std::sqrt(std::max(0.0, A(2, 2))));
    int k = 0;
    axis.cwiseAbs().maxCoeff(&k);
    if (k == 0) {
      axis.y() = std::copysign(axis.y(), A(0, 1));
      axis.z() = std::copysign(axis.z(), A(0, 2));
    } else if (k == 1) {
      axis.x() = std::copysign(axis.x(), A(0, 1));
      axis.z() = std::copysign(axis.z(), A(1, 2));
    } else {
      axis.x() = std::copysign(axis.x(), A(0, 2));
      axis.y() = std::copysign(axis.y(), A(1, 2));
    }
    w = theta * axis.normalized();
  } else {
    const double scale = theta / (2.0 * std::sin(theta));
    w << scale * (R(2, 1) - R(1, 2)), scale * (R(0, 2) - R(2, 0)), scale * (R(1, 0) - R(0, 1));
  }

  const Mat3 wx = skew(w);
  Mat3 V_inv;
  if (theta < 1e-10) {
    V_inv = Mat3::Identity() - 0.5 * wx;
  } else {
    const double half = 0.5 * theta;
    const double cot_half = std::cos(half) / std::sin(half);
    V_inv = Mat3::Identity() - 0.5 * wx +
            ((1.0 - half * cot_half) / (theta * theta)) * wx * wx;
  }

  Vec6 twist;
  twist.head<3>() = V_inv * pose.translation();
  twist.tail<3>() = w;
  return twist;
}

double rotation_angle(const Mat3& rotation) {
  const double c = std::min(1.0, std::max(-1.0, (rotation.trace() - 1.0) * 0.5));
  return std::acos(c);
}

}  // namespace mvopt
