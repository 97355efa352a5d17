// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#include "mvopt/robust.hpp"

#include <algorithm>
#include <cmath>

namespace mvopt {

double RobustLossConfig::cost(double r_scaled) const {
  const double a = std::abs(r_scaled);
  if (kind == RobustKind::kQuadratic || a <= delta) return 0.5 * r_scaled * r_scaled;
  return delta * (a - 0.5 * delta);
}

double RobustLossConfig::weight(double r_scaled) const {
  if (kind == RobustKind::kQuadratic) return 1.0;
  const double a = std::abs(r_scaled);
  return a <= delta ? 1.0 : delta / a;
}

double mad_scale(std::span<const double> residuals, double floor) {
  if (residuals.empty()) return floor;
  std::vector<double> work(residuals.begin(), residuals.end());
  const size_t mid = work.size() / 2;
  std::nth_element(work.begin(), work.begin() + mid, work.end());
  const double median = work[mid];
  for (double& r : work) r = std::abs(r - median);
  std::nth_element(work.begin(), work.begin() + mid, work.end());
  return std::max(floor, 1.4826 * work[mid]);
}

double confidence_weight(double confidence, double residual, double scale,
                         const RobustLossConfig& loss) {
  return confidence * loss.weight(residual / scale);
}

}  // namespace mvopt
