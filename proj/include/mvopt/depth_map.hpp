// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <vector>

#include "mvopt/errors.hpp"

namespace mvopt {

/// Dense per-pixel metric depth with an explicit validity mask.
/// Invalid pixels carry the sentinel value 0, but 0 alone is never trusted:
/// the mask is authoritative. Valid pixels are positive and finite.
class DepthMap {
 public:
  DepthMap() = default;
  DepthMap(int width, int height, int frame_id = -1)
      : width_(width), height_(height), frame_id_(frame_id),
        values_(static_cast<size_t>(width) * height, 0.0f),
        valid_(static_cast<size_t>(width) * height, 0) {
    if (width <= 0 || height <= 0) throw InvalidInputError("depth map: size must be positive");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  int frame_id() const { return frame_id_; }
  void set_frame_id(int id) { frame_id_ = id; }

  bool valid(int u, int v) const { return valid_[index(u, v)] != 0; }
  float value(int u, int v) const { return values_[index(u, v)]; }

  void set(int u, int v, float depth) {
    if (!(depth > 0.0f) || !std::isfinite(depth))
      throw InvalidInputError("depth map: valid depth must be positive and finite");
    values_[index(u, v)] = depth;
    valid_[index(u, v)] = 1;
  }

  void invalidate(int u, int v) {
    values_[index(u, v)] = 0.0f;
    valid_[index(u, v)] = 0;
  }

  size_t valid_count() const {
    size_t n = 0;
    for (uint8_t m : valid_) n += m;
    return n;
  }

  bool same_resolution(const DepthMap& other) const {
    return width_ == other.width_ && height_ == other.height_;
  }

  const std::vector<float>& values() const { return values_; }
  const std::vector<uint8_t>& valid_mask() const { return valid_; }

  size_t index(int u, int v) const { return static_cast<size_t>(v) * width_ + u; }

 private:
  int width_ = 0, height_ = 0;
  int frame_id_ = -1;
  std::vector<float> values_;
  std::vector<uint8_t> valid_;
};

/// Bilinear depth lookup at continuous (u, v). Returns nullopt outside
/// [0, W-1]x[0, H-1] or when any of the four contributing pixels is invalid;
/// mixed valid/invalid neighborhoods are rejected rather than renormalized.
std::optional<double> bilinear_sample(const DepthMap& map, double u, double v);

/// Box-average downsample by an integer factor. A coarse pixel is valid only
/// if every fine pixel in its block is valid.
DepthMap box_downsample(const DepthMap& map, int factor);

/// Bilinear upsample to the given size (used to publish reduced-resolution
/// predictions at full resolution).
DepthMap bilinear_upsample(const DepthMap& map, int width, int height);

}  // namespace mvopt
