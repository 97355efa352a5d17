// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "mvopt/depth_map.hpp"
#include "mvopt/geometry.hpp"
#include "mvopt/mesh.hpp"

namespace mvopt {

/// Truncated signed distance voxel grid. SDF values are stored normalized to
/// [-1, 1] by the truncation distance; weights accumulate per observation.
class TSDFVolume {
 public:
  TSDFVolume() = default;
  TSDFVolume(const Vec3& origin, double voxel_size, int nx, int ny, int nz,
             double truncation, float weight_cap = 64.0f);

  const Vec3& origin() const { return origin_; }
  double voxel_size() const { return voxel_size_; }
  double truncation() const { return truncation_; }
  int nx() const { return nx_; }
  int ny() const { return ny_; }
  int nz() const { return nz_; }
  float weight_cap() const { return weight_cap_; }

  size_t index(int x, int y, int z) const {
    return (static_cast<size_t>(z) * ny_ + y) * nx_ + x;
  }
  Vec3 voxel_center(int x, int y, int z) const {
    return origin_ + voxel_size_ * Vec3(x, y, z);
  }

  float sdf(int x, int y, int z) const { return sdf_[index(x, y, z)]; }
  float weight(int x, int y, int z) const { return weight_[index(x, y, z)]; }
  void set(int x, int y, int z, float sdf, float weight);

  std::vector<float>& sdf_data() { return sdf_; }
  std::vector<float>& weight_data() { return weight_; }
  const std::vector<float>& sdf_data() const { return sdf_; }
  const std::vector<float>& weight_data() const { return weight_; }

  /// Trilinear SDF (normalized units). False when any stencil corner is
  /// unobserved (weight 0) or the point leaves the grid.
  bool sample(const Vec3& p, double& sdf_out) const;

  bool has_observations() const;

 private:
  Vec3 origin_ = Vec3::Zero();
  double voxel_size_ = 0.01;
  double truncation_ = 0.04;
  int nx_ = 0, ny_ = 0, nz_ = 0;
  float weight_cap_ = 64.0f;
  std::vector<float> sdf_;
  std::vector<float> weight_;
};

/// Projective TSDF update: every in-frustum voxel closer than depth + mu is
/// blended with clamp((depth - voxel_cam_z) / mu, -1, 1), weight 1 per
/// observation; voxels more than mu behind the surface stay untouched.
void integrate(TSDFVolume& volume, const DepthMap& depth, const PoseSE3& pose,
               const CameraIntrinsics& K);

/// Marching cubes over sdf = 0, restricted to fully-observed cells. Empty
/// volume yields an empty mesh.
TriangleMesh extract_mesh(const TSDFVolume& volume);

/// Per-pixel ray cast to the first zero crossing (sphere tracing with
/// bisection refinement); pixels without a crossing come back invalid.
DepthMap render_depth(const TSDFVolume& volume, const PoseSE3& pose, const CameraIntrinsics& K);

enum class DepthSource : uint8_t { kInvalid = 0, kStereo = 1, kTsdf = 2 };

struct CompletedDepth {
  DepthMap depth;
  std::vector<DepthSource> provenance;  // per pixel, row-major
};

/// Stereo pixels win bit-exactly; TSDF fills stereo holes; the provenance
/// channel records which source supplied each pixel.
CompletedDepth complete_depth(const DepthMap& stereo, const DepthMap& tsdf_rendered);

}  // namespace mvopt
