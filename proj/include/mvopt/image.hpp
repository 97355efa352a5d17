// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mvopt/errors.hpp"

namespace mvopt {

/// Interleaved RGB float image with values in [0, 1].
class Image {
 public:
  Image() = default;
  Image(int width, int height, float fill = 0.0f)
      : width_(width), height_(height), data_(static_cast<size_t>(width) * height * 3, fill) {
    if (width <= 0 || height <= 0) throw InvalidInputError("image: size must be positive");
  }

  int width() const { return width_; }
  int height() const { return height_; }

  float& at(int u, int v, int c) { return data_[(static_cast<size_t>(v) * width_ + u) * 3 + c]; }
  float at(int u, int v, int c) const { return data_[(static_cast<size_t>(v) * width_ + u) * 3 + c]; }

  std::array<float, 3> pixel(int u, int v) const { return {at(u, v, 0), at(u, v, 1), at(u, v, 2)}; }
  void set_pixel(int u, int v, float r, float g, float b) {
    at(u, v, 0) = r;
    at(u, v, 1) = g;
    at(u, v, 2) = b;
  }

  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

 private:
  int width_ = 0, height_ = 0;
  std::vector<float> data_;
};

/// Single-channel float image (grayscale intensities, confidences, ...).
class GrayImage {
 public:
  GrayImage() = default;
  GrayImage(int width, int height, float fill = 0.0f)
      : width_(width), height_(height), data_(static_cast<size_t>(width) * height, fill) {
    if (width <= 0 || height <= 0) throw InvalidInputError("image: size must be positive");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  float& at(int u, int v) { return data_[static_cast<size_t>(v) * width_ + u]; }
  float at(int u, int v) const { return data_[static_cast<size_t>(v) * width_ + u]; }
  const std::vector<float>& data() const { return data_; }
  std::vector<float>& data() { return data_; }

 private:
  int width_ = 0, height_ = 0;
  std::vector<float> data_;
};

/// Channel-mean grayscale conversion.
GrayImage to_gray(const Image& image);

/// Box-average downsample by an integer factor (truncates edge remainders).
Image box_downsample(const Image& image, int factor);
GrayImage box_downsample(const GrayImage& image, int factor);

/// Bilinear sample inside [0, W-1]x[0, H-1]; nullopt outside.
std::optional<double> sample_bilinear(const GrayImage& image, double u, double v);

/// Value and analytic (du, dv) gradient of the bilinear interpolant.
struct SampleGradient {
  double value = 0, du = 0, dv = 0;
};
std::optional<SampleGradient> sample_bilinear_grad(const GrayImage& image, double u, double v);

}  // namespace mvopt
