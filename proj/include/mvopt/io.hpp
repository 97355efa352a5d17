// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>
#include <utility>
#include <vector>

#include "mvopt/depth_map.hpp"
#include "mvopt/geometry.hpp"
#include "mvopt/image.hpp"
#include "mvopt/mesh.hpp"

namespace mvopt {

// ---- PFM (single channel float32, little endian) ----

void write_pfm(const std::string& path, const DepthMap& map);
DepthMap read_pfm(const std::string& path);

void write_pfm(const std::string& path, const GrayImage& image);
GrayImage read_pfm_gray(const std::string& path);

// ---- PNG ----

/// 16-bit grayscale PNG storing millimeters; the scale factor is declared in
/// a JSON sidecar (<path>.json) so the depth survives the integer format.
void write_png16_depth(const std::string& path, const DepthMap& map);
DepthMap read_png16_depth(const std::string& path);

void write_png8_rgb(const std::string& path, const Image& image);
Image read_png8_rgb(const std::string& path);

/// 8-bit grayscale; used for binary masks (0/255) and confidence previews.
void write_png8_gray(const std::string& path, const std::vector<uint8_t>& pixels, int width,
                     int height);
std::vector<uint8_t> read_png8_gray(const std::string& path, int& width, int& height);

// ---- TUM trajectory (timestamp tx ty tz qx qy qz qw, camera-to-world) ----

/// Poses are world-to-camera in memory and converted on write/load.
void write_tum_trajectory(const std::string& path,
                          const std::vector<std::pair<int, PoseSE3>>& trajectory);
std::vector<std::pair<int, PoseSE3>> read_tum_trajectory(const std::string& path);

// ---- PLY (binary little endian, float32 vertices, int32 indices) ----

void write_ply(const std::string& path, const TriangleMesh& mesh);
TriangleMesh read_ply(const std::string& path);

}  // namespace mvopt
