// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <vector>

#include "mvopt/config.hpp"
#include "mvopt/depth_map.hpp"
#include "mvopt/geometry.hpp"
#include "mvopt/image.hpp"
#include "mvopt/mesh.hpp"
#include "mvopt/rng.hpp"

namespace mvopt {

enum class PrimitiveKind { kPlane, kSphere, kBox };

/// Analytic scene primitive. Planes are finite textured rectangles given by
/// center / normal / in-plane extents; boxes are axis-aligned.
struct Primitive {
  PrimitiveKind kind = PrimitiveKind::kSphere;
  Vec3 center = Vec3::Zero();
  Vec3 normal = Vec3::UnitZ();      // plane only
  Vec3 half_extents = Vec3::Zero(); // plane: (hx, hy, thickness); box: half sizes
  double radius = 0.1;              // sphere only
  int texture_id = 0;
};

enum class RigKind { kOrbit, kGrid };

struct CameraRig {
  RigKind kind = RigKind::kOrbit;
  int count = 16;
  double radius = 1.0;       // orbit radius / grid half-width
  double height = 0.6;       // camera height above the ground plane
  Vec3 target = Vec3(0, 0, 0.12);
};

struct SceneSpec {
  std::vector<Primitive> primitives;
  CameraRig rig;
  CameraIntrinsics intrinsics;
  Vec3 light_direction = Vec3(-0.4, 0.3, -1.0);  // direction the light travels
  double ambient = 0.25;
  int supersample = 2;

  /// World-to-camera poses of the rig.
  std::vector<PoseSE3> rig_poses() const;

  /// Axis-aligned bounds enclosing all primitives with a margin.
  void bounds(Vec3& lo, Vec3& hi, double margin = 0.05) const;

  double scene_scale() const;  // diagonal of the primitive bounds

  toml::Table to_toml() const;
  static SceneSpec from_toml(const toml::Table& table);
};

/// Tabletop default: ground plane, sphere and box, 16-camera orbit.
SceneSpec default_scene(int image_size = 64, int rig_count = 16);

struct RenderedGt {
  Image image;
  DepthMap depth;
};

/// Analytic closest-hit render: Lambertian shading x procedural solid
/// texture, camera z-depth per pixel, background pixels invalid.
RenderedGt render_gt(const SceneSpec& scene, int view_index);
RenderedGt render_gt_pose(const SceneSpec& scene, const PoseSE3& pose);

/// Signed distance to the union of primitives (exact for sphere/box/rect).
double scene_sdf(const SceneSpec& scene, const Vec3& p);

/// Ground-truth surface mesh via marching cubes on the analytic SDF.
TriangleMesh gt_mesh(const SceneSpec& scene, double voxel_size = 0.01);

struct PosePerturbation {
  std::vector<PoseSE3> poses;      // perturbed world-to-camera poses
  std::vector<Vec6> drawn_offsets; // applied left tangent increments
};

/// Per-frame axis-angle + translation noise; the drawn offsets are recorded
/// for recovery scoring.
PosePerturbation perturb_poses(const std::vector<PoseSE3>& poses, double rot_std_deg,
                               double trans_std, uint64_t seed);

/// Corruption models for the artifact study. All magnitudes >= 0; zero spec
/// leaves the depth bit-identical.
struct ArtifactSpec {
  int floater_count = 0;
  double floater_radius_px = 10.0;
  double floater_depth_offset = 0.2;  // fraction pulled toward the camera
  double fog_amplitude = 0.0;         // relative multiplicative field
  double fog_frequency = 2.0;         // cycles across the image
  double stacking_scale_std = 0.0;    // per-view multiplicative bias draw
  double stacking_bias_std = 0.0;     // per-view additive bias draw (meters)
  double hole_fraction = 0.0;
  double noise_rel_std = 0.0;

  bool empty() const {
    return floater_count == 0 && fog_amplitude == 0.0 && stacking_scale_std == 0.0 &&
           stacking_bias_std == 0.0 && hole_fraction == 0.0 && noise_rel_std == 0.0;
  }
};

/// Per-pixel corruption labels (bitwise or of the flags that touched it).
enum CorruptionFlag : uint8_t {
  kFloater = 1,
  kFog = 2,
  kStacking = 4,
  kHole = 8,
  kNoise = 16,
};

struct CorruptedDepth {
  DepthMap depth;
  std::vector<uint8_t> mask;  // row-major corruption bitfield
};

CorruptedDepth inject_artifacts(const DepthMap& depth, const ArtifactSpec& spec, uint64_t seed);

}  // namespace mvopt
