// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#include "mvopt/depth_map.hpp"

namespace mvopt {

std::optional<double> bilinear_sample(const DepthMap& map, double u, double v) {
  const int w = map.width(), h = map.height();
  if (!(u >= 0.0 && v >= 0.0 && u <= w - 1.0 && v <= h - 1.0)) return std::nullopt;

  int u0 = static_cast<int>(std::floor(u));
  int v0 = static_cast<int>(std::floor(v));
  if (u0 > w - 2) u0 = w - 2;  // u == w-1 lands in the last cell with fu == 1
  if (v0 > h - 2) v0 = h - 2;
  if (w == 1) u0 = 0;
  if (h == 1) v0 = 0;
  const int u1 = (w == 1) ? 0 : u0 + 1;
  const int v1 = (h == 1) ? 0 : v0 + 1;
  const double fu = u - u0;
  const double fv = v - v0;

  if (!map.valid(u0, v0) || !map.valid(u1, v0) || !map.valid(u0, v1) || !map.valid(u1, v1))
    return std::nullopt;

  const double d00 = map.value(u0, v0);
  const double d10 = map.value(u1, v0);
  const double d01 = map.value(u0, v1);
  const double d11 = map.value(u1, v1);
  const double top = d00 * (1.0 - fu) + d10 * fu;
  const double bot = d01 * (1.0 - fu) + d11 * fu;
  return top * (1.0 - fv) + bot * fv;
}

DepthMap box_downsample(const DepthMap& map, int factor) {
  if (factor < 1) throw InvalidInputError("box_downsample: factor must be >= 1");
  const int w = map.width() / factor, h = map.height() / factor;
  DepthMap out(w, h, map.frame_id());
  for (int v = 0; v < h; ++v) {
    for (int u = 0; u < w; ++u) {
      double sum = 0.0;
      bool all_valid = true;
      for (int dv = 0; dv < factor && all_valid; ++dv)
        for (int du = 0; du < factor; ++du) {
          const int su = u * factor + du, sv = v * factor + dv;
          if (!map.valid(su, sv)) {
            all_valid = false;
            break;
          }
          sum += map.value(su, sv);
        }
      if (all_valid) out.set(u, v, static_cast<float>(sum / (factor * factor)));
    }
  }
  return out;
}

DepthMap bilinear_upsample(const DepthMap& map, int width, int height) {
  DepthMap out(width, height, map.frame_id());
  const double su = (map.width() > 1 && width > 1) ? double(map.width() - 1) / (width - 1) : 0.0;
  const double sv = (map.height() > 1 && height > 1) ? double(map.height() - 1) / (height - 1) : 0.0;
  for (int v = 0; v < height; ++v)
    for (int u = 0; u < width; ++u)
      if (auto d = bilinear_sample(map, u * su, v * sv); d && *d > 0.0)
        out.set(u, v, static_cast<float>(*d));
  return out;
}

}  // namespace mvopt
