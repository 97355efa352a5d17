// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <utility>
#include <vector>

#include "mvopt/depth_map.hpp"
#include "mvopt/geometry.hpp"
#include "mvopt/image.hpp"
#include "mvopt/mesh.hpp"

namespace mvopt {

/// Ordered (frame id, world-to-camera pose) list.
using Trajectory = std::vector<std::pair<int, PoseSE3>>;

enum class Alignment { kRigid, kSimilarity };

/// RMSE of camera-center residuals after closed-form Umeyama alignment of
/// the estimate onto the ground truth. Needs >= 3 matched frames.
double ate(const Trajectory& estimated, const Trajectory& ground_truth,
           Alignment alignment = Alignment::kRigid);

struct RelativePoseError {
  double rte = 0.0;  // RMSE of relative translation norms (meters)
  double rre = 0.0;  // RMSE of relative rotation angles (degrees)
};

/// TUM-style relative pose error at frame gap delta over matched ids.
RelativePoseError rpe(const Trajectory& estimated, const Trajectory& ground_truth, int delta = 1);

struct DepthErrorStats {
  double absrel = 0.0;
  double delta_fraction = 0.0;  // fraction within the ratio threshold
  size_t pixel_count = 0;
  double acc_1sigma = 0.0;      // mean |err| over pixels with |err| within 1 std of mean |err|
  double applied_scale = 1.0;
};

struct DepthErrorOptions {
  double delta_threshold = 0.05;
  bool median_scale_align = true;
  bool symmetric_ratio = true;  // max(p/g, g/p) - 1; else one-sided |p-g|/g
};

/// Monodepth-style depth error metrics over the jointly-valid pixels.
DepthErrorStats depth_errors(const DepthMap& predicted, const DepthMap& ground_truth,
                             const DepthErrorOptions& options = {});

struct MeshErrorStats {
  double accuracy_pct = 0.0;  // % of predicted samples within sigma of GT surface
  double recall_pct = 0.0;    // % of GT samples within sigma of predicted surface
  double f1_pct = 0.0;        // harmonic mean
  double chamfer_mm = 0.0;    // mean of the two mean point-to-surface distances
};

/// Area-weighted point sampling (fixed seed) with exact point-to-triangle
/// nearest distances through a uniform spatial grid.
MeshErrorStats mesh_errors(const TriangleMesh& predicted, const TriangleMesh& ground_truth,
                           double sigma_mm, int samples_per_mesh = 100000, uint64_t seed = 13);

/// Harmonic mean on percentages, the Tab.-style F-score combination.
double f1_score(double accuracy_pct, double recall_pct);

/// 10 log10(1 / MSE) for [0,1] images; identical images report the 99 dB cap.
double psnr(const Image& rendered, const Image& reference);

}  // namespace mvopt
