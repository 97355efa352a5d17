// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <vector>

#include "mvopt/geometry.hpp"
#include "mvopt/rng.hpp"

namespace mvopt {

/// Standard normal CDF (erfc based, accurate over the full double range).
double std_normal_cdf(double x);

/// Inverse standard normal CDF. Acklam's rational approximation refined by
/// one Halley step; |Phi(Phi^-1(p)) - p| < 1e-12 away from the endpoints.
/// Throws InvalidInputError for p outside (0, 1).
double std_normal_cdf_inv(double p);

/// Gaussian N(d_hat, sigma_d^2) truncated to [t_near, t_far].
struct TruncatedGaussian {
  double d_hat = 1.0;
  double sigma_d = 0.1;
  double t_near = 0.1;
  double t_far = 10.0;

  TruncatedGaussian() = default;
  TruncatedGaussian(double d_hat_, double sigma_d_, double t_near_, double t_far_);

  double phi_a() const;  // Phi((t_near - d_hat) / sigma_d)
  double phi_b() const;

  /// Normalizer Z = sigma_d * sqrt(2 pi) * (Phi_b - Phi_a).
  double normalizer() const;

  /// Density at t; zero outside [t_near, t_far].
  double pdf(double t) const;

  /// CDF of the truncated distribution (0 below t_near, 1 above t_far).
  double cdf(double t) const;

  /// Inverse-transform map of a single uniform draw u in (0, 1).
  double transform(double u) const;
};

/// Draws `count` depths by inverse transform, sorted ascending. With
/// `stratified` (default) the u_j are jittered equal-mass strata; otherwise
/// i.i.d. uniforms. All samples lie strictly inside (t_near, t_far).
std::vector<double> sample_depths(const TruncatedGaussian& tg, int count, Rng& rng,
                                  bool stratified = true);

/// Deterministic variant taking explicit uniform draws (ascending output).
std::vector<double> sample_depths(const TruncatedGaussian& tg, const std::vector<double>& uniforms);

struct RaySamples {
  std::vector<double> t;       // sorted sample depths along the ray
  std::vector<Vec3> points;    // origin + t * direction
  bool depth_guided = false;   // false when the uniform fallback was used
};

/// Places samples along a ray, truncated-Gaussian around d_hat when d_hat is
/// valid (inside the ray interval), stratified-uniform otherwise.
RaySamples place_ray_samples(const Ray& ray, double d_hat, double sigma_d, int count, Rng& rng);

}  // namespace mvopt
