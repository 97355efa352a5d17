// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "mvopt/depth_map.hpp"
#include "mvopt/geometry.hpp"
#include "mvopt/image.hpp"

namespace mvopt {

struct VotingThresholds {
  double tau_depth = 0.05;   // relative depth tolerance
  double tau_reproj = 2.0;   // reprojection tolerance, pixels
  int m_vote = 3;            // minimum supporting views
  double tau_m = 0.5;        // logistic softness, vote units

  void validate(int n_neighbors) const;
};

/// One posed frame: image (may be empty for depth-only work), depth, pose.
struct Frame {
  int id = -1;
  Image image;
  DepthMap depth;
  PoseSE3 pose;  // world-to-camera
};

/// A reference frame plus N neighbors sharing one set of intrinsics.
struct FrameSet {
  CameraIntrinsics intrinsics;
  Frame reference;
  std::vector<Frame> neighbors;

  void validate() const;  // N >= 1, equal depth resolutions
};

struct CheckResult {
  bool pass = false;
  double depth_error = 0.0;   // relative depth error of the tested direction
  double reproj_error = 0.0;  // pixels (backward check only)
};

/// Forward consistency: unproject the reference pixel, project into neighbor
/// i, compare the interpolated neighbor depth against the projected depth.
/// Out-of-frustum, behind-camera and invalid interpolations are "fail" votes.
CheckResult forward_check(int u, int v, const FrameSet& frames, int neighbor,
                          const VotingThresholds& thr);

/// Backward consistency: reproject the neighbor's interpolated depth into the
/// reference frame; requires both the pixel round trip and the depth ratio to
/// agree.
CheckResult backward_check(int u, int v, const FrameSet& frames, int neighbor,
                           const VotingThresholds& thr);

/// C_i = 1 iff both directions pass.
int bidirectional_consistency(int u, int v, const FrameSet& frames, int neighbor,
                              const VotingThresholds& thr);

struct VoteMap {
  int width = 0, height = 0;
  int n_neighbors = 0;
  std::vector<int> votes;            // V in [0, N]
  std::vector<float> confidence;     // V / N
  std::vector<uint8_t> mask;         // M = [V >= m_vote], on valid reference pixels
  std::vector<uint8_t> domain;       // valid mask of the reference depth (Ω_r)
  DepthMap filtered;                 // M ⊙ D_ref

  int vote_at(int u, int v) const { return votes[static_cast<size_t>(v) * width + u]; }
  float confidence_at(int u, int v) const { return confidence[static_cast<size_t>(v) * width + u]; }
  bool mask_at(int u, int v) const { return mask[static_cast<size_t>(v) * width + u] != 0; }

  /// Fraction of valid reference pixels with M = 1.
  double pass_fraction() const;
  double mean_confidence() const;  // over valid reference pixels
};

/// Full-image bidirectional vote. Invalid reference pixels get V = 0, M = 0.
VoteMap vote(const FrameSet& frames, const VotingThresholds& thr);

/// L_vote = 1 - mean over valid pixels of s((V - m_vote) / tau_m),
/// s the logistic function. Throws InvalidInputError on an empty domain.
double vote_loss(const VoteMap& vote_map, const DepthMap& reference_depth,
                 const VotingThresholds& thr);

/// k-nearest frames by camera-center distance whose viewing direction differs
/// from the reference by at least min_angle_deg.
std::vector<int> select_neighbors(const std::vector<PoseSE3>& poses, int reference, int k,
                                  double min_angle_deg = 2.0);

}  // namespace mvopt
