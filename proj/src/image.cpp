// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#include "mvopt/image.hpp"

#include <cmath>

namespace mvopt {

GrayImage to_gray(const Image& image) {
  GrayImage out(image.width(), image.height());
  for (int v = 0; v < image.height(); ++v)
    for (int u = 0; u < image.width(); ++u)
      out.at(u, v) = (image.at(u, v, 0) + image.at(u, v, 1) + image.at(u, v, 2)) / 3.0f;
  return out;
}

Image box_downsample(const Image& image, int factor) {
  if (factor < 1) throw InvalidInputError("box_downsample: factor must be >= 1");
  const int w = image.width() / factor, h = image.height() / factor;
  Image out(w, h);
  const float inv = 1.0f / (factor * factor);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u)
      for (int c = 0; c < 3; ++c) {
        float sum = 0.0f;
        for (int dv = 0; dv < factor; ++dv)
          for (int du = 0; du < factor; ++du) sum += image.at(u * factor + du, v * factor + dv, c);
        out.at(u, v, c) = sum * inv;
      }
  return out;
}

GrayImage box_downsample(const GrayImage& image, int factor) {
  if (factor < 1) throw InvalidInputError("box_downsample: factor must be >= 1");
  const int w = image.width() / factor, h = image.height() / factor;
  GrayImage out(w, h);
  const float inv = 1.0f / (factor * factor);
  for (int v = 0; v < h; ++v)
    for (int u = 0; u < w; ++u) {
      float sum = 0.0f;
      for (int dv = 0; dv < factor; ++dv)
        for (int du = 0; du < factor; ++du) sum += image.at(u * factor + du, v * factor + dv);
      out.at(u, v) = sum * inv;
    }
  return out;
}

namespace {

struct Cell {
  int u0, v0, u1, v1;
  double fu, fv;
};

std::optional<Cell> locate(int w, int h, double u, double v) {
  if (!(u >= 0.0 && v >= 0.0 && u <= w - 1.0 && v <= h - 1.0)) return std::nullopt;
  Cell c;
  c.u0 = static_cast<int>(std::floor(u));
  c.v0 = static_cast<int>(std::floor(v));
  if (c.u0 > w - 2) c.u0 = w - 2;
  if (c.v0 > h - 2) c.v0 = h - 2;
  if (w == 1) c.u0 = 0;
  if (h == 1) c.v0 = 0;
  c.u1 = (w == 1) ? 0 : c.u0 + 1;
  c.v1 = (h == 1) ? 0 : c.v0 + 1;
  c.fu = u - c.u0;
  c.fv = v - c.v0;
  return c;
}

}  // namespace

std::optional<double> sample_bilinear(const GrayImage& image, double u, double v) {
  auto c = locate(image.width(), image.height(), u, v);
  if (!c) return std::nullopt;
  const double g00 = image.at(c->u0, c->v0), g10 = image.at(c->u1, c->v0);
  const double g01 = image.at(c->u0, c->v1), g11 = image.at(c->u1, c->v1);
  const double top = g00 * (1.0 - c->fu) + g10 * c->fu;
  const double bot = g01 * (1.0 - c->fu) + g11 * c->fu;
  return top * (1.0 - c->fv) + bot * c->fv;
}

std::optional<SampleGradient> sample_bilinear_grad(const GrayImage& image, double u, double v) {
  auto c = locate(image.width(), image.height(), u, v);
  if (!c) return std::nullopt;
  const double g00 = image.at(c->u0, c->v0), g10 = image.at(c->u1, c->v0);
  const double g01 = image.at(c->u0, c->v1), g11 = image.at(c->u1, c->v1);
  SampleGradient out;
  const double top = g00 * (1.0 - c->fu) + g10 * c->fu;
  const double bot = g01 * (1.0 - c->fu) + g11 * c->fu;
  out.value = top * (1.0 - c->fv) + bot * c->fv;
  out.du = (g10 - g00) * (1.0 - c->fv) + (g11 - g01) * c->fv;
  out.dv = bot - top;
  return out;
}

}  // namespace mvopt
