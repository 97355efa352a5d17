// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#include "mvopt/voting.hpp"

#include <algorithm>
#include <cmath>

namespace mvopt {

void VotingThresholds::validate(int n_neighbors) const {
  if (!(tau_depth > 0.0)) throw InvalidInputError("thresholds: tau_depth must be positive");
  if (!(tau_reproj > 0.0)) throw InvalidInputError("thresholds: tau_reproj must be positive");
  if (m_vote < 1 || m_vote > n_neighbors)
    throw InvalidInputError("thresholds: need 1 <= m_vote <= N");
  if (!(tau_m > 0.0)) throw InvalidInputError("thresholds: tau_m must be positive");
}

void FrameSet::validate() const {
  if (neighbors.empty()) throw InvalidInputError("frame set: need at least one neighbor");
  for (const Frame& f : neighbors)
    if (!f.depth.same_resolution(reference.depth))
      throw InvalidInputError("frame set: depth resolution mismatch");
}

namespace {

// The projection chain of the consistency checks is written out
// componentwise (rather than through PoseSE3/Eigen products) to keep the
// exact evaluation-order contract with the per-pixel test oracle.
struct ChainPoint {
  double x, y, z;
};

ChainPoint chain_unproject(double u, double v, double d, const CameraIntrinsics& K) {
  return {(u - K.cx) * d / K.fx, (v - K.cy) * d / K.fy, d};
}

ChainPoint chain_cam_to_world(const ChainPoint& p, const PoseSE3& pose) {
  const Mat3& R = pose.rotation();
  const Vec3& t = pose.translation();
  const double dx = p.x - t.x(), dy = p.y - t.y(), dz = p.z - t.z();
  // R^T * (p - t)
  return {R(0, 0) * dx + R(1, 0) * dy + R(2, 0) * dz,
          R(0, 1) * dx + R(1, 1) * dy + R(2, 1) * dz,
          R(0, 2) * dx + R(1, 2) * dy + R(2, 2) * dz};
}

ChainPoint chain_world_to_cam(const ChainPoint& p, const PoseSE3& pose) {
  const Mat3& R = pose.rotation();
  const Vec3& t = pose.translation();
  return {R(0, 0) * p.x + R(0, 1) * p.y + R(0, 2) * p.z + t.x(),
          R(1, 0) * p.x + R(1, 1) * p.y + R(1, 2) * p.z + t.y(),
          R(2, 0) * p.x + R(2, 1) * p.y + R(2, 2) * p.z + t.z()};
}

}  // namespace

CheckResult forward_check(int u, int v, const FrameSet& frames, int neighbor,
                          const VotingThresholds& thr) {
  CheckResult result;
  const DepthMap& d_ref_map = frames.reference.depth;
  if (!d_ref_map.valid(u, v)) return result;
  const double d_ref = d_ref_map.value(u, v);

  const ChainPoint p_ref = chain_unproject(u, v, d_ref, frames.intrinsics);
  const ChainPoint p_world = chain_cam_to_world(p_ref, frames.reference.pose);
  const Frame& src = frames.neighbors[neighbor];
  const ChainPoint p_src = chain_world_to_cam(p_world, src.pose);
  if (!(p_src.z > 0.0)) return result;

  const double u_src = frames.intrinsics.fx * p_src.x / p_src.z + frames.intrinsics.cx;
  const double v_src = frames.intrinsics.fy * p_src.y / p_src.z + frames.intrinsics.cy;
  const auto d_interp = bilinear_sample(src.depth, u_src, v_src);
  if (!d_interp) return result;

  result.depth_error = std::abs(*d_interp - p_src.z) / p_src.z;
  result.pass = result.depth_error < thr.tau_depth;
  return result;
}

CheckResult backward_check(int u, int v, const FrameSet& frames, int neighbor,
                           const VotingThresholds& thr) {
  CheckResult result;
  const DepthMap& d_ref_map = frames.reference.depth;
  if (!d_ref_map.valid(u, v)) return result;
  const double d_ref = d_ref_map.value(u, v);

  const ChainPoint p_ref = chain_unproject(u, v, d_ref, frames.intrinsics);
  const ChainPoint p_world = chain_cam_to_world(p_ref, frames.reference.pose);
  const Frame& src = frames.neighbors[neighbor];
  const ChainPoint p_src = chain_world_to_cam(p_world, src.pose);
  if (!(p_src.z > 0.0)) return result;

  const double u_src = frames.intrinsics.fx * p_src.x / p_src.z + frames.intrinsics.cx;
  const double v_src = frames.intrinsics.fy * p_src.y / p_src.z + frames.intrinsics.cy;
  const auto d_interp = bilinear_sample(src.depth, u_src, v_src);
  if (!d_interp) return result;

  // Back-project the interpolated depth into the reference frame.
  const ChainPoint p_back_src = chain_unproject(u_src, v_src, *d_interp, frames.intrinsics);
  const ChainPoint p_back_world = chain_cam_to_world(p_back_src, src.pose);
  const ChainPoint p_back_ref = chain_world_to_cam(p_back_world, frames.reference.pose);
  if (!(p_back_ref.z > 0.0)) return result;

  const double u_back = frames.intrinsics.fx * p_back_ref.x / p_back_ref.z + frames.intrinsics.cx;
  const double v_back = frames.intrinsics.fy * p_back_ref.y / p_back_ref.z + frames.intrinsics.cy;
  const double du = u_back - u, dv = v_back - v;
  result.reproj_error = std::sqrt(du * du + dv * dv);
  result.depth_error = std::abs(p_back_ref.z - d_ref) / d_ref;
  result.pass = result.reproj_error < thr.tau_reproj && result.depth_error < thr.tau_depth;
  return result;
}

int bidirectional_consistency(int u, int v, const FrameSet& frames, int neighbor,
                              const VotingThresholds& thr) {
  if (!forward_check(u, v, frames, neighbor, thr).pass) return 0;
  return backward_check(u, v, frames, neighbor, thr).pass ? 1 : 0;
}

double VoteMap::pass_fraction() const {
  size_t valid = 0, passed = 0;
  for (size_t i = 0; i < domain.size(); ++i) {
    if (!domain[i]) continue;
    ++valid;
    passed += mask[i];
  }
  return valid == 0 ? 0.0 : static_cast<double>(passed) / static_cast<double>(valid);
}

double VoteMap::mean_confidence() const {
  double sum = 0.0;
  size_t valid = 0;
  for (size_t i = 0; i < domain.size(); ++i) {
    if (!domain[i]) continue;
    ++valid;
    sum += confidence[i];
  }
  return valid == 0 ? 0.0 : sum / static_cast<double>(valid);
}

VoteMap vote(const FrameSet& frames, const VotingThresholds& thr) {
  frames.validate();
  const int n = static_cast<int>(frames.neighbors.size());
  thr.validate(n);

  const DepthMap& d_ref = frames.reference.depth;
  const int w = d_ref.width(), h = d_ref.height();
  VoteMap out;
  out.width = w;
  out.height = h;
  out.n_neighbors = n;
  out.votes.assign(static_cast<size_t>(w) * h, 0);
  out.confidence.assign(static_cast<size_t>(w) * h, 0.0f);
  out.mask.assign(static_cast<size_t>(w) * h, 0);
  out.domain = d_ref.valid_mask();
  out.filtered = DepthMap(w, h, d_ref.frame_id());

#pragma omp parallel for schedule(static)
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      if (!d_ref.valid(u, v)) continue;
      int count = 0;
      for (int i = 0; i < n; ++i) count += bidirectional_consistency(u, v, frames, i, thr);
      const size_t idx = static_cast<size_t>(v) * w + u;
      out.votes[idx] = count;
      out.confidence[idx] = static_cast<float>(count) / static_cast<float>(n);
      if (count >= thr.m_vote) {
        out.mask[idx] = 1;
        out.filtered.set(u, v, d_ref.value(u, v));
      }
    }
  }
  return out;
}

double vote_loss(const VoteMap& vote_map, const DepthMap& reference_depth,
                 const VotingThresholds& thr) {
  if (vote_map.width != reference_depth.width() || vote_map.height != reference_depth.height())
    throw InvalidInputError("vote_loss: resolution mismatch");
  double sum = 0.0;
  size_t count = 0;
  for (int v = 0; v < vote_map.height; ++v)
    for (int u = 0; u < vote_map.width; ++u) {
      if (!reference_depth.valid(u, v)) continue;
      const double x = (vote_map.vote_at(u, v) - thr.m_vote) / thr.tau_m;
      sum += 1.0 / (1.0 + std::exp(-x));
      ++count;
    }
  if (count == 0) throw InvalidInputError("vote_loss: no valid pixels in reference");
  return 1.0 - sum / static_cast<double>(count);
}

std::vector<int> select_neighbors(const std::vector<PoseSE3>& poses, int reference, int k,
                                  double min_angle_deg) {
  if (reference < 0 || reference >= static_cast<int>(poses.size()))
    throw InvalidInputError("select_neighbors: reference out of range");
  const Vec3 ref_center = poses[reference].center();
  const Vec3 ref_dir = poses[reference].view_direction();
  const double min_cos = std::cos(min_angle_deg * M_PI / 180.0);

  std::vector<std::pair<double, int>> candidates;
  for (int i = 0; i < static_cast<int>(poses.size()); ++i) {
    if (i == reference) continue;
    candidates.emplace_back((poses[i].center() - ref_center).norm(), i);
  }
  std::stable_sort(candidates.begin(), candidates.end());

  std::vector<int> selected;
  for (const auto& [dist, i] : candidates) {
    if (static_cast<int>(selected.size()) >= k) break;
    if (poses[i].view_direction().dot(ref_dir) < min_cos) selected.push_back(i);
  }
  // Relax the angle constraint if it starved the neighbor set.
  for (const auto& [dist, i] : candidates) {
    if (static_cast<int>(selected.size()) >= k) break;
    if (std::find(selected.begin(), selected.end(), i) == selected.end()) selected.push_back(i);
  }
  return selected;
}

}  // namespace mvopt
