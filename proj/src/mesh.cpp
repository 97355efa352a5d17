// Copyright mvopt contributors.
// SPDX-License-Identifier: Apache-2.0
#include "mvopt/mesh.hpp"

#include <cmath>

namespace mvopt {

double TriangleMesh::surface_area() const {
  double area = 0.0;
  for (const auto& tri : triangles) {
    const Vec3& a = vertices[tri[0]];
    const Vec3& b = vertices[tri[1]];
    const Vec3& c = vertices[tri[2]];
    area += 0.5 * (b - a).cross(c - a).norm();
  }
  return area;
}

void TriangleMesh::validate() const {
  const int n = static_cast<int>(vertices.size());
  for (const auto& tri : triangles)
    for (int k : tri)
      if (k < 0 || k >= n) throw InvalidInputError("mesh: triangle index out of range");
  for (const auto& v : vertices)
    if (!v.allFinite()) throw InvalidInputError("mesh: non-finite vertex");
}

}  // namespace mvopt
