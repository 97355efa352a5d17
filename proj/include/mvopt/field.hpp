// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <string>
#include <vector>

#include "mvopt/depth_map.hpp"
#include "mvopt/geometry.hpp"
#include "mvopt/image.hpp"
#include "mvopt/rng.hpp"

namespace mvopt {

/// Dense voxel radiance field: trilinear density (1/m) and RGB color grids
/// over an axis-aligned box. Grid nodes span the box inclusively.
class DenseGridField {
 public:
  DenseGridField() = default;
  DenseGridField(int resolution, const Vec3& bounds_min, const Vec3& bounds_max);

  int resolution() const { return resolution_; }
  const Vec3& bounds_min() const { return bounds_min_; }
  const Vec3& bounds_max() const { return bounds_max_; }

  float density(int x, int y, int z) const { return density_[node_index(x, y, z)]; }
  float color(int x, int y, int z, int c) const { return color_[node_index(x, y, z) * 3 + c]; }
  void set_density(int x, int y, int z, float value);
  void set_color(int x, int y, int z, float r, float g, float b);

  std::vector<float>& density_data() { return density_; }
  std::vector<float>& color_data() { return color_; }
  const std::vector<float>& density_data() const { return density_; }
  const std::vector<float>& color_data() const { return color_; }

  /// Clamp densities to >= 0 and colors to [0, 1] (used after raw updates).
  void project_constraints();

  bool contains(const Vec3& p) const;

  /// Trilinear interpolation; zero density / black outside the bounds.
  double density_at(const Vec3& p) const;
  Vec3 color_at(const Vec3& p) const;

  /// Trilinear resample onto a new resolution (coarse-to-fine warm start).
  DenseGridField resampled(int new_resolution) const;

  size_t node_index(int x, int y, int z) const {
    return (static_cast<size_t>(z) * resolution_ + y) * resolution_ + x;
  }

  /// Node spacing in meters (minimum over axes).
  double voxel_size() const;

  /// Flat binary layout: bounds (6 x float64), resolution (uint32),
  /// density grid (D^3 x float32), color grid (3 D^3 x float32), all little
  /// endian, density indexed x-fastest.
  void save(const std::string& path) const;
  static DenseGridField load(const std::string& path);

 private:
  int resolution_ = 0;
  Vec3 bounds_min_ = Vec3::Zero();
  Vec3 bounds_max_ = Vec3::Zero();
  std::vector<float> density_;
  std::vector<float> color_;
};

struct RenderConfig {
  int samples_per_ray = 64;
  double t_near = 0.1;
  double t_far = 4.0;
  int downsample = 8;
  Vec3 background = Vec3::Zero();

  void validate() const;
};

struct RayRender {
  Vec3 color = Vec3::Zero();
  double expected_depth = 0.0;  // opacity-weighted mean sample depth
  double opacity = 0.0;         // sum of compositing weights
};

/// Emission-absorption compositing along the ray at explicit sorted sample
/// depths. The final segment length runs to ray.t_far.
RayRender render_ray_at(const DenseGridField& field, const Ray& ray, const std::vector<double>& ts,
                        const Vec3& background);

/// Uniform midpoint sampling version (deterministic).
RayRender render_ray(const DenseGridField& field, const Ray& ray, const RenderConfig& cfg);

/// Vector-Jacobian product of the rendered color: accumulates
/// d(color_grad . color)/d(grid values) into the gradient buffers
/// (same layouts as the field's grids). Buffers must be pre-sized.
void render_ray_backward(const DenseGridField& field, const Ray& ray, const std::vector<double>& ts,
                         const Vec3& background, const Vec3& color_grad,
                         std::vector<float>& density_grad, std::vector<float>& color_grad_buffer);

struct RenderedView {
  Image color;
  DepthMap depth;        // expected depth, invalid where opacity ~ 0
  GrayImage opacity;
};

/// Renders every pixel of the camera downsampled by cfg.downsample
/// (intrinsics divided, dimensions floor-divided).
RenderedView render_view_downsampled(const DenseGridField& field, const PoseSE3& pose,
                                     const CameraIntrinsics& K, const RenderConfig& cfg);

/// Full-resolution render with the given intrinsics (no downsampling).
RenderedView render_view(const DenseGridField& field, const PoseSE3& pose,
                         const CameraIntrinsics& K, const RenderConfig& cfg);

/// Sum over frames and 1/8-scale pixels of rho(|rendered - box-downsampled
/// observation|_1); rho is Huber with a fixed intensity-scale knee.
double nerf_photometric_energy(const DenseGridField& field, const std::vector<Image>& images,
                               const std::vector<PoseSE3>& poses, const CameraIntrinsics& K,
                               const RenderConfig& cfg, double huber_delta = 0.1345);

struct FitSchedule {
  int iterations_per_level = 400;
  int levels = 3;              // D/4 -> D/2 -> D
  int final_resolution = 64;
  double lr_density = 0.5;
  double lr_color = 0.1;
  uint64_t seed = 7;
  bool coarse_to_fine = true;  // false: all iterations at final resolution
};

/// Optional per-view depth guidance for ray sampling during fitting.
struct FitGuidance {
  const std::vector<DepthMap>* depth = nullptr;  // at training resolution
  double sigma_d = 0.05;
};

/// Fits the grids to posed images by Adam on a photometric L2 loss, training
/// rays at cfg.downsample scale, with grid-resolution doubling warm starts.
/// Throws InsufficientDataError for fewer than 3 views.
DenseGridField fit_field(const std::vector<Image>& images, const std::vector<PoseSE3>& poses,
                         const CameraIntrinsics& K, const RenderConfig& cfg,
                         const FitSchedule& schedule, const Vec3& bounds_min,
                         const Vec3& bounds_max, const FitGuidance* guidance = nullptr);

}  // namespace mvopt
