// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#include "mvopt/metrics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "mvopt/rng.hpp"

namespace mvopt {

namespace {

std::vector<std::pair<PoseSE3, PoseSE3>> match_by_id(const Trajectory& a, const Trajectory& b) {
  std::map<int, PoseSE3> lookup;
  for (const auto& [id, pose] : b) lookup.emplace(id, pose);
  std::vector<std::pair<PoseSE3, PoseSE3>> matched;
  for (const auto& [id, pose] : a) {
    auto it = lookup.find(id);
    if (it != lookup.end()) matched.emplace_back(pose, it->second);
  }
  return matched;
}

}  // namespace

double ate(const Trajectory& estimated, const Trajectory& ground_truth, Alignment alignment) {
  const auto matched = match_by_id(estimated, ground_truth);
  if (matched.size() < 3) throw InsufficientDataError("ate: need >= 3 matched frames");

  Eigen::Matrix3Xd src(3, matched.size()), dst(3, matched.size());
  for (size_t i = 0; i < matched.size(); ++i) {
    src.col(i) = matched[i].first.center();
    dst.col(i) = matched[i].second.center();
  }
  const Eigen::Matrix4d transform =
      Eigen::umeyama(src, dst, alignment == Alignment::kSimilarity);

  double sq_sum = 0.0;
  for (size_t i = 0; i < matched.size(); ++i) {
    const Vec3 aligned =
        transform.topLeftCorner<3, 3>() * src.col(i) + transform.topRightCorner<3, 1>();
    sq_sum += (aligned - dst.col(i)).squaredNorm();
  }
  return std::sqrt(sq_sum / matched.size());
}

RelativePoseError rpe(const Trajectory& estimated, const Trajectory& ground_truth, int delta) {
  const auto matched = match_by_id(estimated, ground_truth);
  if (static_cast<int>(matched.size()) < delta + 1)
    throw InsufficientDataError("rpe: need at least delta + 1 matched frames");

  double trans_sq = 0.0, rot_sq = 0.0;
  size_t count = 0;
  for (size_t i = 0; i + delta < matched.size(); ++i) {
    // Relative camera motion i -> i+delta in camera-to-world form.
    const PoseSE3 rel_est = matched[i].first * matched[i + delta].first.inverse();
    const PoseSE3 rel_gt = matched[i].second * matched[i + delta].second.inverse();
    const PoseSE3 error = rel_gt.inverse() * rel_est;
    trans_sq += error.translation().squaredNorm();
    const double angle = rotation_angle(error.rotation());
    rot_sq += angle * angle;
    ++count;
  }
  RelativePoseError out;
  out.rte = std::sqrt(trans_sq / count);
  out.rre = std::sqrt(rot_sq / count) * 180.0 / M_PI;
  return out;
}

DepthErrorStats depth_errors(const DepthMap& predicted, const DepthMap& ground_truth,
                             const DepthErrorOptions& options) {
  if (!predicted.same_resolution(ground_truth))
    throw InvalidInputError("depth_errors: resolution mismatch");

  std::vector<double> pred, gt;
  for (int v = 0; v < predicted.height(); ++v)
    for (int u = 0; u < predicted.width(); ++u)
      if (predicted.valid(u, v) && ground_truth.valid(u, v)) {
        pred.push_back(predicted.value(u, v));
        gt.push_back(ground_truth.value(u, v));
      }
  if (pred.empty()) throw InsufficientDataError("depth_errors: no overlapping valid pixels");

  DepthErrorStats stats;
  stats.pixel_count = pred.size();
  if (options.median_scale_align) {
    std::vector<double> ratios(pred.size());
    for (size_t i = 0; i < pred.size(); ++i) ratios[i] = gt[i] / pred[i];
    const size_t mid = ratios.size() / 2;
    std::nth_element(ratios.begin(), ratios.begin() + mid, ratios.end());
    stats.applied_scale = ratios[mid];
  }

  std::vector<double> abs_err(pred.size());
  double absrel_sum = 0.0;
  size_t within = 0;
  for (size_t i = 0; i < pred.size(); ++i) {
    const double p = pred[i] * stats.applied_scale;
    absrel_sum += std::abs(p - gt[i]) / gt[i];
    const double deviation = options.symmetric_ratio
                                 ? std::max(p / gt[i], gt[i] / p) - 1.0
                                 : std::abs(p - gt[i]) / gt[i];
    if (deviation < options.delta_threshold) ++within;
    abs_err[i] = std::abs(p - gt[i]);
  }
  stats.absrel = absrel_sum / pred.size();
  stats.delta_fraction = static_cast<double>(within) / pred.size();

  // Acc over the +-1 sigma core of the absolute-error distribution.
  double mean = 0.0;
  for (double e : abs_err) mean += e;
  mean /= abs_err.size();
  double var = 0.0;
  for (double e : abs_err) var += (e - mean) * (e - mean);
  const double std_dev = std::sqrt(var / abs_err.size());
  double core_sum = 0.0;
  size_t core_count = 0;
  for (double e : abs_err)
    if (std::abs(e - mean) <= std_dev) {
      core_sum += e;
      ++core_count;
    }
  stats.acc_1sigma = core_count ? core_sum / core_count : mean;
  return stats;
}

namespace {

// Exact point-to-triangle distance (Ericson-style region walk).
double point_triangle_distance(const Vec3& p, const Vec3& a, const Vec3& b, const Vec3& c) {
  const Vec3 ab = b - a, ac = c - a, ap = p - a;
  const double d1 = ab.dot(ap), d2 = ac.dot(ap);
  if (d1 <= 0.0 && d2 <= 0.0) return (p - a).norm();
  const Vec3 bp = p - b;
  const double d3 = ab.dot(bp), d4 = ac.dot(bp);
  if (d3 >= 0.0 && d4 <= d3) return (p - b).norm();
  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double t = d1 / (d1 - d3);
    return (p - (a + t * ab)).norm();
  }
  const Vec3 cp = p - c;
  const double d5 = ab.dot(cp), d6 = ac.dot(cp);
  if (d6 >= 0.0 && d5 <= d6) return (p - c).norm();
  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double t = d2 / (d2 - d6);
    return (p - (a + t * ac)).norm();
  }
  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    return (p - (b + t * (c - b))).norm();
  }
  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom, w = vc * denom;
  return (p - (a + v * ab + w * ac)).norm();
}

/// Uniform grid over triangle bounding boxes for nearest-surface queries.
class TriangleGrid {
 public:
  explicit TriangleGrid(const TriangleMesh& mesh) : mesh_(mesh) {
    lo_ = Vec3::Constant(std::numeric_limits<double>::infinity());
    hi_ = -lo_;
    for (const Vec3& v : mesh.vertices) {
      lo_ = lo_.cwiseMin(v);
      hi_ = hi_.cwiseMax(v);
    }
    const Vec3 extent = (hi_ - lo_).cwiseMax(1e-9);
    const double target_cells = std::cbrt(std::max<size_t>(1, mesh.triangles.size()));
    res_ = std::max(1, std::min(64, static_cast<int>(target_cells)));
    cell_ = extent / res_;
    cells_.resize(static_cast<size_t>(res_) * res_ * res_);
    for (int t = 0; t < static_cast<int>(mesh.triangles.size()); ++t) {
      const auto& tri = mesh.triangles[t];
      Vec3 tlo = mesh.vertices[tri[0]].cwiseMin(mesh.vertices[tri[1]]).cwiseMin(mesh.vertices[tri[2]]);
      Vec3 thi = mesh.vertices[tri[0]].cwiseMax(mesh.vertices[tri[1]]).cwiseMax(mesh.vertices[tri[2]]);
      int c0[3], c1[3];
      clamp_cell(tlo, c0);
      clamp_cell(thi, c1);
      for (int z = c0[2]; z <= c1[2]; ++z)
        for (int y = c0[1]; y <= c1[1]; ++y)
          for (int x = c0[0]; x <= c1[0]; ++x)
            cells_[(static_cast<size_t>(z) * res_ + y) * res_ + x].push_back(t);
    }
  }

  double nearest_distance(const Vec3& p) const {
    int pc[3];
    clamp_cell(p, pc);
    double best = std::numeric_limits<double>::infinity();
    // Expand rings of cells until the found distance is provably minimal.
    for (int ring = 0; ring < res_ + 1; ++ring) {
      bool any = false;
      for (int z = std::max(0, pc[2] - ring); z <= std::min(res_ - 1, pc[2] + ring); ++z)
        for (int y = std::max(0, pc[1] - ring); y <= std::min(res_ - 1, pc[1] + ring); ++y)
          for (int x = std::max(0, pc[0] - ring); x <= std::min(res_ - 1, pc[0] + ring); ++x) {
            if (ring > 0 && std::abs(x - pc[0]) != ring && std::abs(y - pc[1]) != ring &&
                std::abs(z - pc[2]) != ring)
              continue;  // interior already visited
            any = true;
            for (int t : cells_[(static_cast<size_t>(z) * res_ + y) * res_ + x]) {
              const auto& tri = mesh_.triangles[t];
              best = std::min(best, point_triangle_distance(p, mesh_.vertices[tri[0]],
                                                            mesh_.vertices[tri[1]],
                                                            mesh_.vertices[tri[2]]));
            }
          }
      if (std::isfinite(best)) {
        // Certified when the next ring cannot contain anything closer.
        const double ring_clearance = ring * cell_.minCoeff();
        if (best <= ring_clearance) break;
      }
      if (!any && ring >= res_) break;
    }
    return best;
  }

 private:
  void clamp_cell(const Vec3& p, int out[3]) const {
    for (int a = 0; a < 3; ++a) {
      const double g = (p[a] - lo_[a]) / cell_[a];
      out[a] = std::max(0, std::min(res_ - 1, static_cast<int>(g)));
    }
  }

  const TriangleMesh& mesh_;
  Vec3 lo_, hi_, cell_;
  int res_ = 1;
  std::vector<std::vector<int>> cells_;
};

std::vector<Vec3> sample_surface(const TriangleMesh& mesh, int count, Rng& rng) {
  std::vector<double> cumulative;
  cumulative.reserve(mesh.triangles.size());
  double total = 0.0;
  for (const auto& tri : mesh.triangles) {
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    total += 0.5 * (b - a).cross(c - a).norm();
    cumulative.push_back(total);
  }
  std::vector<Vec3> points;
  points.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double pick = rng.uniform() * total;
    const auto it = std::lower_bound(cumulative.begin(), cumulative.end(), pick);
    const size_t t = std::min(mesh.triangles.size() - 1,
                              static_cast<size_t>(it - cumulative.begin()));
    const auto& tri = mesh.triangles[t];
    double r1 = std::sqrt(rng.uniform());
    double r2 = rng.uniform();
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    points.push_back((1.0 - r1) * a + r1 * (1.0 - r2) * b + r1 * r2 * c);
  }
  return points;
}

}  // namespace

double f1_score(double accuracy_pct, double recall_pct) {
  if (accuracy_pct + recall_pct <= 0.0) return 0.0;
  return 2.0 * accuracy_pct * recall_pct / (accuracy_pct + recall_pct);
}

MeshErrorStats mesh_errors(const TriangleMesh& predicted, const TriangleMesh& ground_truth,
                           double sigma_mm, int samples_per_mesh, uint64_t seed) {
  if (predicted.empty() || ground_truth.empty())
    throw InsufficientDataError("mesh_errors: empty mesh");

  Rng rng(seed);
  const std::vector<Vec3> pred_points = sample_surface(predicted, samples_per_mesh, rng);
  const std::vector<Vec3> gt_points = sample_surface(ground_truth, samples_per_mesh, rng);
  const TriangleGrid pred_grid(predicted);
  const TriangleGrid gt_grid(ground_truth);
  const double sigma_m = sigma_mm * 1e-3;

  size_t acc_hits = 0;
  double acc_dist = 0.0;
  std::vector<double> d_pred(pred_points.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < static_cast<int>(pred_points.size()); ++i)
    d_pred[i] = gt_grid.nearest_distance(pred_points[i]);
  for (double d : d_pred) {
    if (d <= sigma_m) ++acc_hits;
    acc_dist += d;
  }

  size_t rec_hits = 0;
  double rec_dist = 0.0;
  std::vector<double> d_gt(gt_points.size());
#pragma omp parallel for schedule(static)
  for (int i = 0; i < static_cast<int>(gt_points.size()); ++i)
    d_gt[i] = pred_grid.nearest_distance(gt_points[i]);
  for (double d : d_gt) {
    if (d <= sigma_m) ++rec_hits;
    rec_dist += d;
  }

  MeshErrorStats stats;
  stats.accuracy_pct = 100.0 * acc_hits / pred_points.size();
  stats.recall_pct = 100.0 * rec_hits / gt_points.size();
  stats.f1_pct = f1_score(stats.accuracy_pct, stats.recall_pct);
  stats.chamfer_mm =
      0.5 * (acc_dist / pred_points.size() + rec_dist / gt_points.size()) * 1000.0;
  return stats;
}

double psnr(const Image& rendered, const Image& reference) {
  if (rendered.width() != reference.width() || rendered.height() != reference.height())
    throw InvalidInputError("psnr: dimension mismatch");
  double mse = 0.0;
  const size_t n = rendered.data().size();
  for (size_t i = 0; i < n; ++i) {
    const double d = static_cast<double>(rendered.data()[i]) - reference.data()[i];
    mse += d * d;
  }
  mse /= static_cast<double>(n);
  if (mse <= 0.0) return 99.0;
  return std::min(99.0, 10.0 * std::log10(1.0 / mse));
}

}  // namespace mvopt
