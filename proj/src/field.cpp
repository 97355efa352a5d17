// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#include "mvopt/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "mvopt/errors.hpp"
#include "mvopt/sampling.hpp"

namespace mvopt {

DenseGridField::DenseGridField(int resolution, const Vec3& bounds_min, const Vec3& bounds_max)
    : resolution_(resolution), bounds_min_(bounds_min), bounds_max_(bounds_max) {
  if (resolution < 2) throw InvalidInputError("field: resolution must be >= 2");
  if (!((bounds_max - bounds_min).minCoeff() > 0.0))
    throw InvalidInputError("field: degenerate bounds");
  const size_t n = static_cast<size_t>(resolution) * resolution * resolution;
  density_.assign(n, 0.0f);
  color_.assign(n * 3, 0.0f);
}

void DenseGridField::set_density(int x, int y, int z, float value) {
  if (value < 0.0f) throw InvalidInputError("field: density must be non-negative");
  density_[node_index(x, y, z)] = value;
}

void DenseGridField::set_color(int x, int y, int z, float r, float g, float b) {
  auto check = [](float c) {
    if (c < 0.0f || c > 1.0f) throw InvalidInputError("field: color must lie in [0, 1]");
  };
  check(r);
  check(g);
  check(b);
  const size_t i = node_index(x, y, z) * 3;
  color_[i] = r;
  color_[i + 1] = g;
  color_[i + 2] = b;
}

void DenseGridField::project_constraints() {
  for (float& d : density_) d = std::max(0.0f, d);
  for (float& c : color_) c = std::min(1.0f, std::max(0.0f, c));
}

bool DenseGridField::contains(const Vec3& p) const {
  return p.x() >= bounds_min_.x() && p.x() <= bounds_max_.x() && p.y() >= bounds_min_.y() &&
         p.y() <= bounds_max_.y() && p.z() >= bounds_min_.z() && p.z() <= bounds_max_.z();
}

namespace {

struct TrilinearStencil {
  size_t corner[8];
  double weight[8];
  bool inside = false;
};

TrilinearStencil stencil_at(const Vec3& p, const Vec3& lo, const Vec3& hi, int res,
                            const DenseGridField& field) {
  TrilinearStencil s;
  if (p.x() < lo.x() || p.x() > hi.x() || p.y() < lo.y() || p.y() > hi.y() || p.z() < lo.z() ||
      p.z() > hi.z())
    return s;
  const double gx = (p.x() - lo.x()) / (hi.x() - lo.x()) * (res - 1);
  const double gy = (p.y() - lo.y()) / (hi.y() - lo.y()) * (res - 1);
  const double gz = (p.z() - lo.z()) / (hi.z() - lo.z()) * (res - 1);
  int x0 = std::min(static_cast<int>(gx), res - 2);
  int y0 = std::min(static_cast<int>(gy), res - 2);
  int z0 = std::min(static_cast<int>(gz), res - 2);
  const double fx = gx - x0, fy = gy - y0, fz = gz - z0;
  int k = 0;
  for (int dz = 0; dz < 2; ++dz)
    for (int dy = 0; dy < 2; ++dy)
      for (int dx = 0; dx < 2; ++dx, ++k) {
        s.corner[k] = field.node_index(x0 + dx, y0 + dy, z0 + dz);
        s.weight[k] = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy) * (dz ? fz : 1.0 - fz);
      }
  s.inside = true;
  return s;
}

}  // namespace

double DenseGridField::density_at(const Vec3& p) const {
  const TrilinearStencil s = stencil_at(p, bounds_min_, bounds_max_, resolution_, *this);
  if (!s.inside) return 0.0;
  double out = 0.0;
  for (int k = 0; k < 8; ++k) out += s.weight[k] * density_[s.corner[k]];
  return out;
}

Vec3 DenseGridField::color_at(const Vec3& p) const {
  const TrilinearStencil s = stencil_at(p, bounds_min_, bounds_max_, resolution_, *this);
  if (!s.inside) return Vec3::Zero();
  Vec3 out = Vec3::Zero();
  for (int k = 0; k < 8; ++k) {
    const size_t i = s.corner[k] * 3;
    out.x() += s.weight[k] * color_[i];
    out.y() += s.weight[k] * color_[i + 1];
    out.z() += s.weight[k] * color_[i + 2];
  }
  return out;
}

DenseGridField DenseGridField::resampled(int new_resolution) const {
  DenseGridField out(new_resolution, bounds_min_, bounds_max_);
  for (int z = 0; z < new_resolution; ++z)
    for (int y = 0; y < new_resolution; ++y)
      for (int x = 0; x < new_resolution; ++x) {
        const Vec3 p = bounds_min_ +
                       Vec3((bounds_max_.x() - bounds_min_.x()) * x / (new_resolution - 1.0),
                            (bounds_max_.y() - bounds_min_.y()) * y / (new_resolution - 1.0),
                            (bounds_max_.z() - bounds_min_.z()) * z / (new_resolution - 1.0));
        out.density_[out.node_index(x, y, z)] = static_cast<float>(density_at(p));
        const Vec3 c = color_at(p);
        const size_t i = out.node_index(x, y, z) * 3;
        out.color_[i] = static_cast<float>(c.x());
        out.color_[i + 1] = static_cast<float>(c.y());
        out.color_[i + 2] = static_cast<float>(c.z());
      }
  return out;
}

double DenseGridField::voxel_size() const {
  return (bounds_max_ - bounds_min_).minCoeff() / (resolution_ - 1);
}

void DenseGridField::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  double bounds[6] = {bounds_min_.x(), bounds_min_.y(), bounds_min_.z(),
                      bounds_max_.x(), bounds_max_.y(), bounds_max_.z()};
  out.write(reinterpret_cast<const char*>(bounds), sizeof(bounds));
  const uint32_t res = static_cast<uint32_t>(resolution_);
  out.write(reinterpret_cast<const char*>(&res), sizeof(res));
  out.write(reinterpret_cast<const char*>(density_.data()),
            static_cast<std::streamsize>(density_.size() * sizeof(float)));
  out.write(reinterpret_cast<const char*>(color_.data()),
            static_cast<std::streamsize>(color_.size() * sizeof(float)));
  if (!out) throw IoError("short write: " + path);
}

DenseGridField DenseGridField::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  double bounds[6];
  in.read(reinterpret_cast<char*>(bounds), sizeof(bounds));
  uint32_t res = 0;
  in.read(reinterpret_cast<char*>(&res), sizeof(res));
  if (!in || res < 2 || res > 4096) throw IoError("corrupt field file: " + path);
  DenseGridField field(static_cast<int>(res), Vec3(bounds[0], bounds[1], bounds[2]),
                       Vec3(bounds[3], bounds[4], bounds[5]));
  in.read(reinterpret_cast<char*>(field.density_.data()),
          static_cast<std::streamsize>(field.density_.size() * sizeof(float)));
  in.read(reinterpret_cast<char*>(field.color_.data()),
          static_cast<std::streamsize>(field.color_.size() * sizeof(float)));
  if (!in) throw IoError("short read: " + path);
  return field;
}

void RenderConfig::validate() const {
  if (samples_per_ray < 2) throw InvalidInputError("render: need at least 2 samples per ray");
  if (!(t_near < t_far)) throw InvalidInputError("render: need t_near < t_far");
  if (downsample < 1) throw InvalidInputError("render: downsample must be >= 1");
}

RayRender render_ray_at(const DenseGridField& field, const Ray& ray, const std::vector<double>& ts,
                        const Vec3& background) {
  RayRender out;
  double transmittance = 1.0;
  double depth_sum = 0.0;
  const size_t n = ts.size();
  for (size_t k = 0; k < n; ++k) {
    const double delta = (k + 1 < n) ? ts[k + 1] - ts[k] : std::max(0.0, ray.t_far - ts[k]);
    const Vec3 p = ray.at(ts[k]);
    const double sigma = field.density_at(p);
    const double alpha = 1.0 - std::exp(-std::min(80.0, sigma * delta));
    const double weight = transmittance * alpha;
    if (weight > 0.0) {
      out.color += weight * field.color_at(p);
      depth_sum += weight * ts[k];
      out.opacity += weight;
    }
    transmittance *= (1.0 - alpha);
  }
  out.color += transmittance * background;
  out.expected_depth = out.opacity > 1e-12 ? depth_sum / out.opacity : 0.0;
  return out;
}

namespace {

std::vector<double> midpoint_samples(double t_near, double t_far, int count) {
  std::vector<double> ts(count);
  const double span = t_far - t_near;
  for (int k = 0; k < count; ++k) ts[k] = t_near + span * (k + 0.5) / count;
  return ts;
}

}  // namespace

RayRender render_ray(const DenseGridField& field, const Ray& ray, const RenderConfig& cfg) {
  cfg.validate();
  return render_ray_at(field, ray, midpoint_samples(ray.t_near, ray.t_far, cfg.samples_per_ray),
                       cfg.background);
}

void render_ray_backward(const DenseGridField& field, const Ray& ray, const std::vector<double>& ts,
                         const Vec3& background, const Vec3& color_grad,
                         std::vector<float>& density_grad, std::vector<float>& color_grad_buffer) {
  const size_t n = ts.size();
  std::vector<double> sigma(n), alpha(n), trans(n), delta(n);
  std::vector<Vec3> sample_color(n);
  std::vector<TrilinearStencil> stencils(n);

  double transmittance = 1.0;
  for (size_t k = 0; k < n; ++k) {
    delta[k] = (k + 1 < n) ? ts[k + 1] - ts[k] : std::max(0.0, ray.t_far - ts[k]);
    const Vec3 p = ray.at(ts[k]);
    stencils[k] = stencil_at(p, field.bounds_min(), field.bounds_max(), field.resolution(), field);
    sigma[k] = field.density_at(p);
    alpha[k] = 1.0 - std::exp(-std::min(80.0, sigma[k] * delta[k]));
    sample_color[k] = field.color_at(p);
    trans[k] = transmittance;
    transmittance *= (1.0 - alpha[k]);
  }

  // suffix[k] = sum_{j>k} T_j alpha_j c_j + T_final * background
  Vec3 suffix = transmittance * background;
  for (size_t k = n; k-- > 0;) {
    const double weight = trans[k] * alpha[k];

    // d(color)/d(c_k) = weight
    if (stencils[k].inside && weight > 0.0) {
      const double g = weight;
      for (int i = 0; i < 8; ++i) {
        const size_t base = stencils[k].corner[i] * 3;
        const double w = stencils[k].weight[i] * g;
        color_grad_buffer[base] += static_cast<float>(w * color_grad.x());
        color_grad_buffer[base + 1] += static_cast<float>(w * color_grad.y());
        color_grad_buffer[base + 2] += static_cast<float>(w * color_grad.z());
      }
    }

    // d(color)/d(alpha_k) = T_k c_k - suffix_k / (1 - alpha_k)
    const double one_minus = 1.0 - alpha[k];
    if (stencils[k].inside && one_minus > 1e-30) {
      const Vec3 dcolor_dalpha = trans[k] * sample_color[k] - suffix / one_minus;
      const double dalpha_dsigma = delta[k] * one_minus;
      const double g = color_grad.dot(dcolor_dalpha) * dalpha_dsigma;
      for (int i = 0; i < 8; ++i)
        density_grad[stencils[k].corner[i]] += static_cast<float>(stencils[k].weight[i] * g);
    }

    suffix += weight * sample_color[k];
  }
}

RenderedView render_view(const DenseGridField& field, const PoseSE3& pose,
                         const CameraIntrinsics& K, const RenderConfig& cfg) {
  RenderedView out{Image(K.width, K.height), DepthMap(K.width, K.height),
                   GrayImage(K.width, K.height)};
#pragma omp parallel for schedule(static)
  for (int v = 0; v < K.height; ++v) {
    for (int u = 0; u < K.width; ++u) {
      const Ray ray = camera_ray(u, v, K, pose, cfg.t_near, cfg.t_far);
      const RayRender r = render_ray(field, ray, cfg);
      out.color.set_pixel(u, v, static_cast<float>(r.color.x()), static_cast<float>(r.color.y()),
                          static_cast<float>(r.color.z()));
      out.opacity.at(u, v) = static_cast<float>(r.opacity);
      if (r.opacity > 0.5 && r.expected_depth > 0.0)
        out.depth.set(u, v, static_cast<float>(r.expected_depth));
    }
  }
  return out;
}

RenderedView render_view_downsampled(const DenseGridField& field, const PoseSE3& pose,
                                     const CameraIntrinsics& K, const RenderConfig& cfg) {
  cfg.validate();
  return render_view(field, pose, K.downsampled(cfg.downsample), cfg);
}

double nerf_photometric_energy(const DenseGridField& field, const std::vector<Image>& images,
                               const std::vector<PoseSE3>& poses, const CameraIntrinsics& K,
                               const RenderConfig& cfg, double huber_delta) {
  if (images.size() != poses.size())
    throw InvalidInputError("nerf energy: images/poses size mismatch");
  double energy = 0.0;
  for (size_t i = 0; i < images.size(); ++i) {
    const RenderedView rendered = render_view_downsampled(field, poses[i], K, cfg);
    const Image observed = box_downsample(images[i], cfg.downsample);
    for (int v = 0; v < rendered.color.height(); ++v)
      for (int u = 0; u < rendered.color.width(); ++u) {
        double l1 = 0.0;
        for (int c = 0; c < 3; ++c)
          l1 += std::abs(static_cast<double>(rendered.color.at(u, v, c)) - observed.at(u, v, c));
        energy += l1 <= huber_delta ? 0.5 * l1 * l1 : huber_delta * (l1 - 0.5 * huber_delta);
      }
  }
  return energy;
}

namespace {

struct Adam {
  std::vector<float> m, v;
  int t = 0;
  void init(size_t n) {
    m.assign(n, 0.0f);
    v.assign(n, 0.0f);
    t = 0;
  }
  void step(std::vector<float>& params, const std::vector<float>& grad, double lr) {
    ++t;
    const double b1 = 0.9, b2 = 0.999, eps = 1e-8;
    const double correction = std::sqrt(1.0 - std::pow(b2, t)) / (1.0 - std::pow(b1, t));
    for (size_t i = 0; i < params.size(); ++i) {
      m[i] = static_cast<float>(b1 * m[i] + (1.0 - b1) * grad[i]);
      v[i] = static_cast<float>(b2 * v[i] + (1.0 - b2) * grad[i] * grad[i]);
      params[i] -= static_cast<float>(lr * correction * m[i] / (std::sqrt(v[i]) + eps));
    }
  }
};

struct TrainRay {
  Ray ray;
  Vec3 target;
};

}  // namespace

DenseGridField fit_field(const std::vector<Image>& images, const std::vector<PoseSE3>& poses,
                         const CameraIntrinsics& K, const RenderConfig& cfg,
                         const FitSchedule& schedule, const Vec3& bounds_min,
                         const Vec3& bounds_max, const FitGuidance* guidance) {
  if (images.size() < 3) throw InsufficientDataError("fit_field: need at least 3 posed views");
  if (images.size() != poses.size())
    throw InvalidInputError("fit_field: images/poses size mismatch");
  cfg.validate();

  // Training rays at the downsampled scale.
  const CameraIntrinsics k_train = K.downsampled(cfg.downsample);
  std::vector<TrainRay> rays;
  std::vector<double> guide_depth;  // 0 where unguided
  for (size_t i = 0; i < images.size(); ++i) {
    const Image target = box_downsample(images[i], cfg.downsample);
    for (int v = 0; v < k_train.height; ++v)
      for (int u = 0; u < k_train.width; ++u) {
        TrainRay tr;
        tr.ray = camera_ray(u, v, k_train, poses[i], cfg.t_near, cfg.t_far);
        tr.target = Vec3(target.at(u, v, 0), target.at(u, v, 1), target.at(u, v, 2));
        rays.push_back(tr);
        double d = 0.0;
        if (guidance && guidance->depth && i < guidance->depth->size()) {
          const DepthMap& dm = (*guidance->depth)[i];
          if (dm.width() == k_train.width && dm.height() == k_train.height && dm.valid(u, v))
            d = dm.value(u, v);
        }
        guide_depth.push_back(d);
      }
  }

  std::vector<int> level_res;
  if (schedule.coarse_to_fine && schedule.levels > 1) {
    for (int l = schedule.levels - 1; l >= 0; --l)
      level_res.push_back(std::max(4, schedule.final_resolution >> l));
  } else {
    level_res.push_back(schedule.final_resolution);
  }

  const double extent = (bounds_max - bounds_min).maxCoeff();
  DenseGridField field(level_res[0], bounds_min, bounds_max);
  std::fill(field.density_data().begin(), field.density_data().end(),
            static_cast<float>(1.0 / extent));
  std::fill(field.color_data().begin(), field.color_data().end(), 0.5f);

  const Rng base(schedule.seed);
  const int total_levels = static_cast<int>(level_res.size());
  const int iters = schedule.coarse_to_fine
                        ? schedule.iterations_per_level
                        : schedule.iterations_per_level * schedule.levels;

  for (int level = 0; level < total_levels; ++level) {
    if (level > 0) field = field.resampled(level_res[level]);
    Adam adam_density, adam_color;
    adam_density.init(field.density_data().size());
    adam_color.init(field.color_data().size());
    std::vector<float> density_grad(field.density_data().size());
    std::vector<float> color_grad(field.color_data().size());

    for (int it = 0; it < iters; ++it) {
      std::fill(density_grad.begin(), density_grad.end(), 0.0f);
      std::fill(color_grad.begin(), color_grad.end(), 0.0f);

      Rng iter_rng = base.fork(static_cast<uint64_t>(level) * 1000003 + it);
      const double jitter = iter_rng.uniform();
      for (size_t r = 0; r < rays.size(); ++r) {
        const Ray& ray = rays[r].ray;
        std::vector<double> ts(cfg.samples_per_ray);
        if (guidance && guide_depth[r] > ray.t_near && guide_depth[r] < ray.t_far) {
          Rng ray_rng = iter_rng.fork(r);
          const RaySamples s =
              place_ray_samples(ray, guide_depth[r], guidance->sigma_d, cfg.samples_per_ray, ray_rng);
          ts = s.t;
        } else {
          const double span = ray.t_far - ray.t_near;
          for (int k = 0; k < cfg.samples_per_ray; ++k)
            ts[k] = ray.t_near + span * (k + jitter) / cfg.samples_per_ray;
        }
        const RayRender rendered = render_ray_at(field, ray, ts, cfg.background);
        const Vec3 diff = 2.0 * (rendered.color - rays[r].target);
        render_ray_backward(field, ray, ts, cfg.background, diff, density_grad, color_grad);
      }

      const double scale = 1.0 / static_cast<double>(rays.size());
      for (float& g : density_grad) g = static_cast<float>(g * scale);
      for (float& g : color_grad) g = static_cast<float>(g * scale);
      adam_density.step(field.density_data(), density_grad, schedule.lr_density);
      adam_color.step(field.color_data(), color_grad, schedule.lr_color);
      field.project_constraints();
    }
  }
  return field;
}

}  // namespace mvopt
