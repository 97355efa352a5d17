// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <vector>

#include "mvopt/geometry.hpp"

namespace mvopt {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<int, 3>> triangles;
  std::vector<Vec3> normals;  // optional, per vertex when present

  bool empty() const { return triangles.empty(); }

  /// Sum of triangle areas.
  double surface_area() const;

  /// Throws InvalidInputError on out-of-range indices or non-finite vertices.
  void validate() const;
};

}  // namespace mvopt
