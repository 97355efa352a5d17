// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

namespace mvopt {

enum class RobustKind { kHuber, kQuadratic };

/// Robust loss for IRLS. delta is in scaled-residual units; residuals are
/// normalized by a MAD-based scale estimate before weighting.
struct RobustLossConfig {
  RobustKind kind = RobustKind::kHuber;
  double delta = 1.345;

  /// Huber cost of a scaled residual r (quadratic kind: r^2 / 2 as well,
  /// so the two agree inside the inlier region).
  double cost(double r_scaled) const;

  /// IRLS weight w = rho'(r)/r: 1 inside delta, delta/|r| outside. The
  /// quadratic kind always returns 1.
  double weight(double r_scaled) const;
};

/// 1.4826 * median(|r - median(r)|), floored to keep weights finite when the
/// residuals collapse to zero.
double mad_scale(std::span<const double> residuals, double floor = 1e-9);

/// Eq.-style combined weight: confidence * w_robust(residual / scale).
double confidence_weight(double confidence, double residual, double scale,
                         const RobustLossConfig& loss);

}  // namespace mvopt
