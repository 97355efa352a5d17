// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#include "mvopt/tsdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

namespace mvopt {

namespace {
#include "detail/marching_cubes_tables.inc"
}  // namespace

TSDFVolume::TSDFVolume(const Vec3& origin, double voxel_size, int nx, int ny, int nz,
                       double truncation, float weight_cap)
    : origin_(origin), voxel_size_(voxel_size), truncation_(truncation), nx_(nx), ny_(ny), nz_(nz),
      weight_cap_(weight_cap) {
  if (nx < 2 || ny < 2 || nz < 2) throw InvalidInputError("tsdf: need at least 2 voxels per axis");
  if (!(voxel_size > 0.0)) throw InvalidInputError("tsdf: voxel size must be positive");
  if (!(truncation >= 2.0 * voxel_size))
    throw InvalidInputError("tsdf: truncation must be >= 2 voxel sizes");
  const size_t n = static_cast<size_t>(nx) * ny * nz;
  sdf_.assign(n, 0.0f);
  weight_.assign(n, 0.0f);
}

void TSDFVolume::set(int x, int y, int z, float sdf, float weight) {
  if (sdf < -1.0f || sdf > 1.0f) throw InvalidInputError("tsdf: sdf must lie in [-1, 1]");
  if (weight < 0.0f) throw InvalidInputError("tsdf: weight must be non-negative");
  sdf_[index(x, y, z)] = sdf;
  weight_[index(x, y, z)] = weight;
}

bool TSDFVolume::sample(const Vec3& p, double& sdf_out) const {
  const Vec3 g = (p - origin_) / voxel_size_;
  if (g.x() < 0.0 || g.y() < 0.0 || g.z() < 0.0 || g.x() > nx_ - 1.0 || g.y() > ny_ - 1.0 ||
      g.z() > nz_ - 1.0)
    return false;
  const int x0 = std::min(static_cast<int>(g.x()), nx_ - 2);
  const int y0 = std::min(static_cast<int>(g.y()), ny_ - 2);
  const int z0 = std::min(static_cast<int>(g.z()), nz_ - 2);
  const double fx = g.x() - x0, fy = g.y() - y0, fz = g.z() - z0;
  double acc = 0.0;
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx) {
        if (weight_[index(x0 + dx, y0 + dy, z0 + dz)] <= 0.0f) return false;
        const double w = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy) * (dz ? fz : 1.0 - fz);
        acc += w * sdf_[index(x0 + dx, y0 + dy, z0 + dz)];
      }
  sdf_out = acc;
  return true;
}

bool TSDFVolume::has_observations() const {
  for (float w : weight_)
    if (w > 0.0f) return true;
  return false;
}

void integrate(TSDFVolume& volume, const DepthMap& depth, const PoseSE3& pose,
               const CameraIntrinsics& K) {
  if (depth.width() != K.width || depth.height() != K.height)
    throw InvalidInputError("integrate: depth resolution does not match intrinsics");
  const double mu = volume.truncation();
  const float cap = volume.weight_cap();

#pragma omp parallel for schedule(static)
  for (int z = 0; z < volume.nz(); ++z) {
    for (int y = 0; y < volume.ny(); ++y)
      for (int x = 0; x < volume.nx(); ++x) {
        const Vec3 p_cam = pose.world_to_cam(volume.voxel_center(x, y, z));
        if (!(p_cam.z() > 0.0)) continue;
        const double u = K.fx * p_cam.x() / p_cam.z() + K.cx;
        const double v = K.fy * p_cam.y() / p_cam.z() + K.cy;
        const int ui = static_cast<int>(std::lround(u));
        const int vi = static_cast<int>(std::lround(v));
        if (ui < 0 || vi < 0 || ui >= K.width || vi >= K.height) continue;
        if (!depth.valid(ui, vi)) continue;
        const double d = depth.value(ui, vi);
        const double sdf_m = d - p_cam.z();
        if (sdf_m < -mu) continue;  // more than mu behind the surface: unknown
        const float tsdf = static_cast<float>(std::min(1.0, sdf_m / mu));
        const size_t idx = volume.index(x, y, z);
        const float w_old = volume.weight_data()[idx];
        volume.sdf_data()[idx] = (volume.sdf_data()[idx] * w_old + tsdf) / (w_old + 1.0f);
        volume.weight_data()[idx] = std::min(cap, w_old + 1.0f);
      }
  }
}

TriangleMesh extract_mesh(const TSDFVolume& volume) {
  TriangleMesh mesh;
  if (!volume.has_observations()) return mesh;

  // Shared iso-vertices keyed by (lower corner voxel, edge axis).
  std::unordered_map<uint64_t, int> edge_vertex;
  auto edge_key = [&](int x, int y, int z, int axis) {
    return static_cast<uint64_t>(volume.index(x, y, z)) * 3 + axis;
  };

  // Cube corner offsets and the (lower corner, axis) id of each of the 12
  // edges in the classic table convention.
  static const int corner_off[8][3] = {{0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0},
                                       {0, 0, 1}, {1, 0, 1}, {1, 1, 1}, {0, 1, 1}};
  static const int edge_corners[12][2] = {{0, 1}, {1, 2}, {2, 3}, {3, 0}, {4, 5}, {5, 6},
                                          {6, 7}, {7, 4}, {0, 4}, {1, 5}, {2, 6}, {3, 7}};
  static const int edge_axis[12] = {0, 1, 0, 1, 0, 1, 0, 1, 2, 2, 2, 2};
  static const int edge_base[12][3] = {{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 0},
                                       {0, 0, 1}, {1, 0, 1}, {0, 1, 1}, {0, 0, 1},
                                       {0, 0, 0}, {1, 0, 0}, {1, 1, 0}, {0, 1, 0}};

  for (int z = 0; z + 1 < volume.nz(); ++z)
    for (int y = 0; y + 1 < volume.ny(); ++y)
      for (int x = 0; x + 1 < volume.nx(); ++x) {
        float value[8];
        bool observed = true;
        int cube_index = 0;
        for (int c = 0; c < 8; ++c) {
          const int cx = x + corner_off[c][0], cy = y + corner_off[c][1], cz = z + corner_off[c][2];
          if (volume.weight(cx, cy, cz) <= 0.0f) {
            observed = false;
            break;
          }
          value[c] = volume.sdf(cx, cy, cz);
          if (value[c] < 0.0f) cube_index |= (1 << c);
        }
        if (!observed || kEdgeTable[cube_index] == 0) continue;

        int vertex_of_edge[12];
        for (int e = 0; e < 12; ++e) {
          if (!(kEdgeTable[cube_index] & (1 << e))) continue;
          const uint64_t key = edge_key(x + edge_base[e][0], y + edge_base[e][1],
                                        z + edge_base[e][2], edge_axis[e]);
          auto it = edge_vertex.find(key);
          if (it != edge_vertex.end()) {
            vertex_of_edge[e] = it->second;
            continue;
          }
          const int a = edge_corners[e][0], b = edge_corners[e][1];
          const Vec3 pa = volume.voxel_center(x + corner_off[a][0], y + corner_off[a][1],
                                              z + corner_off[a][2]);
          const Vec3 pb = volume.voxel_center(x + corner_off[b][0], y + corner_off[b][1],
                                              z + corner_off[b][2]);
          const double va = value[a], vb = value[b];
          const double t = (std::abs(vb - va) > 1e-12) ? (0.0 - va) / (vb - va) : 0.5;
          mesh.vertices.push_back(pa + std::min(1.0, std::max(0.0, t)) * (pb - pa));
          const int idx = static_cast<int>(mesh.vertices.size()) - 1;
          edge_vertex.emplace(key, idx);
          vertex_of_edge[e] = idx;
        }

        for (int k = 0; kTriTable[cube_index][k] != -1; k += 3) {
          const int i0 = vertex_of_edge[kTriTable[cube_index][k]];
          const int i1 = vertex_of_edge[kTriTable[cube_index][k + 1]];
          const int i2 = vertex_of_edge[kTriTable[cube_index][k + 2]];
          if (i0 == i1 || i1 == i2 || i0 == i2) continue;  // degenerate
          mesh.triangles.push_back({i0, i1, i2});
        }
      }
  return mesh;
}

DepthMap render_depth(const TSDFVolume& volume, const PoseSE3& pose, const CameraIntrinsics& K) {
  DepthMap out(K.width, K.height);
  const double mu = volume.truncation();
  const double voxel = volume.voxel_size();
  const Vec3 lo = volume.origin();
  const Vec3 hi = volume.origin() + voxel * Vec3(volume.nx() - 1, volume.ny() - 1, volume.nz() - 1);

#pragma omp parallel for schedule(static)
  for (int v = 0; v < K.height; ++v) {
    for (int u = 0; u < K.width; ++u) {
      const Vec3 dir_cam((u - K.cx) / K.fx, (v - K.cy) / K.fy, 1.0);
      const Vec3 origin = pose.center();
      Vec3 dir = pose.rotation().transpose() * dir_cam;
      const double dir_norm = dir.norm();
      dir /= dir_norm;
      const double z_per_t = dir_cam.z() / dir_norm;  // camera z-depth per ray unit

      // Slab intersection with the node-span box.
      double t0 = 0.0, t1 = std::numeric_limits<double>::infinity();
      bool miss = false;
      for (int a = 0; a < 3 && !miss; ++a) {
        if (std::abs(dir[a]) < 1e-12) {
          if (origin[a] < lo[a] || origin[a] > hi[a]) miss = true;
          continue;
        }
        double ta = (lo[a] - origin[a]) / dir[a];
        double tb = (hi[a] - origin[a]) / dir[a];
        if (ta > tb) std::swap(ta, tb);
        t0 = std::max(t0, ta);
        t1 = std::min(t1, tb);
      }
      if (miss || t1 <= t0) continue;

      double t = t0 + 1e-6;
      double prev_t = -1.0, prev_sdf = 0.0;
      bool prev_known = false;
      bool hit = false;
      double hit_t = 0.0;
      while (t < t1) {
        double sdf = 0.0;
        const bool known = volume.sample(origin + t * dir, sdf);
        if (known && prev_known && prev_sdf > 0.0 && sdf <= 0.0) {
          // Bisection refinement of the crossing.
          double ta = prev_t, tb = t;
          for (int it = 0; it < 40; ++it) {
            const double tm = 0.5 * (ta + tb);
            double sm = 0.0;
            if (!volume.sample(origin + tm * dir, sm)) break;
            (sm > 0.0 ? ta : tb) = tm;
          }
          hit = true;
          hit_t = 0.5 * (ta + tb);
          break;
        }
        prev_t = t;
        prev_sdf = sdf;
        prev_known = known;
        t += known ? std::max(0.25 * voxel, 0.6 * std::abs(sdf) * mu) : 0.5 * voxel;
      }
      if (hit) {
        const double z = hit_t * z_per_t;
        if (z > 0.0) out.set(u, v, static_cast<float>(z));
      }
    }
  }
  return out;
}

CompletedDepth complete_depth(const DepthMap& stereo, const DepthMap& tsdf_rendered) {
  if (!stereo.same_resolution(tsdf_rendered))
    throw InvalidInputError("complete_depth: resolution mismatch");
  CompletedDepth out{DepthMap(stereo.width(), stereo.height(), stereo.frame_id()),
                     std::vector<DepthSource>(static_cast<size_t>(stereo.width()) * stereo.height(),
                                              DepthSource::kInvalid)};
  for (int v = 0; v < stereo.height(); ++v)
    for (int u = 0; u < stereo.width(); ++u) {
      const size_t i = out.depth.index(u, v);
      if (stereo.valid(u, v)) {
        out.depth.set(u, v, stereo.value(u, v));
        out.provenance[i] = DepthSource::kStereo;
      } else if (tsdf_rendered.valid(u, v)) {
        out.depth.set(u, v, tsdf_rendered.value(u, v));
        out.provenance[i] = DepthSource::kTsdf;
      }
    }
  return out;
}

}  // namespace mvopt
