// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#include "mvopt/sampling.hpp"

#include <algorithm>
#include <cmath>

namespace mvopt {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * M_SQRT1_2); }

namespace {

double std_normal_pdf(double x) {
  return std::exp(-0.5 * x * x) / std::sqrt(2.0 * M_PI);
}

// Acklam's rational approximation of the probit function.
double acklam(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                             -2.759285104469687e+02, 1.383577518672690e+02,
                             -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                             -1.556989798598866e+02, 6.680131188771972e+01,
                             -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                             -2.400758277161838e+00, -2.549732539343734e+00,
                             4.374664141464968e+00,  2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                             2.445134137142996e+00, 3.754408661907416e+00};
  const double p_low = 0.02425;

  if (p < p_low) {
    const double q = std::sqrt(-2.0 * std::log(p));
    return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  if (p > 1.0 - p_low) {
    const double q = std::sqrt(-2.0 * std::log(1.0 - p));
    return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
           ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
  }
  const double q = p - 0.5;
  const double r = q * q;
  return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
         (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_cdf_inv(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInputError("cdf_inv: p must lie in (0, 1)");
  double x = acklam(p);
  // One Halley step on f(x) = Phi(x) - p.
  const double e = std_normal_cdf(x) - p;
  const double u = e / std_normal_pdf(x);
  x = x - u / (1.0 + 0.5 * x * u);
  return x;
}

TruncatedGaussian::TruncatedGaussian(double d_hat_, double sigma_d_, double t_near_, double t_far_)
    : d_hat(d_hat_), sigma_d(sigma_d_), t_near(t_near_), t_far(t_far_) {
  if (!(sigma_d > 0.0)) throw InvalidInputError("truncated gaussian: sigma_d must be positive");
  if (!(t_near < t_far)) throw InvalidInputError("truncated gaussian: need t_near < t_far");
  if (!(phi_b() > phi_a()))
    throw InvalidInputError("truncated gaussian: zero mass inside [t_near, t_far]");
}

double TruncatedGaussian::phi_a() const { return std_normal_cdf((t_near - d_hat) / sigma_d); }
double TruncatedGaussian::phi_b() const { return std_normal_cdf((t_far - d_hat) / sigma_d); }

double TruncatedGaussian::normalizer() const {
  return sigma_d * std::sqrt(2.0 * M_PI) * (phi_b() - phi_a());
}

double TruncatedGaussian::pdf(double t) const {
  if (t < t_near || t > t_far) return 0.0;
  const double z = (t - d_hat) / sigma_d;
  return std::exp(-0.5 * z * z) / normalizer();
}

double TruncatedGaussian::cdf(double t) const {
  if (t <= t_near) return 0.0;
  if (t >= t_far) return 1.0;
  const double a = phi_a();
  return (std_normal_cdf((t - d_hat) / sigma_d) - a) / (phi_b() - a);
}

double TruncatedGaussian::transform(double u) const {
  const double a = phi_a(), b = phi_b();
  const double t = d_hat + sigma_d * std_normal_cdf_inv(a + u * (b - a));
  return std::min(t_far, std::max(t_near, t));
}

std::vector<double> sample_depths(const TruncatedGaussian& tg, int count, Rng& rng,
                                  bool stratified) {
  if (count < 1) throw InvalidInputError("sample_depths: count must be >= 1");
  std::vector<double> uniforms(count);
  if (stratified) {
    for (int j = 0; j < count; ++j) uniforms[j] = (j + rng.uniform()) / count;
  } else {
    for (int j = 0; j < count; ++j) uniforms[j] = rng.uniform();
  }
  // Keep draws strictly inside (0, 1) so the probit stays finite.
  for (double& u : uniforms) u = std::min(1.0 - 1e-12, std::max(1e-12, u));
  return sample_depths(tg, uniforms);
}

std::vector<double> sample_depths(const TruncatedGaussian& tg,
                                  const std::vector<double>& uniforms) {
  std::vector<double> out;
  out.reserve(uniforms.size());
  for (double u : uniforms) out.push_back(tg.transform(u));
  std::sort(out.begin(), out.end());
  return out;
}

RaySamples place_ray_samples(const Ray& ray, double d_hat, double sigma_d, int count, Rng& rng) {
  RaySamples out;
  const bool guided = std::isfinite(d_hat) && d_hat > ray.t_near && d_hat < ray.t_far &&
                      std::isfinite(sigma_d) && sigma_d > 0.0;
  if (guided) {
    out.t = sample_depths(TruncatedGaussian(d_hat, sigma_d, ray.t_near, ray.t_far), count, rng);
    out.depth_guided = true;
  } else {
    // Stratified uniform fallback covering the whole interval.
    out.t.resize(count);
    const double span = ray.t_far - ray.t_near;
    for (int j = 0; j < count; ++j)
      out.t[j] = ray.t_near + span * ((j + rng.uniform()) / count);
  }
  out.points.reserve(out.t.size());
  for (double t : out.t) out.points.push_back(ray.at(t));
  return out;
}

}  // namespace mvopt
