// Copyright 2026 The wala Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "wala/mesh.hpp"

#include <cmath>
#include <map>
#include <utility>

namespace wala {

namespace {

Vec3 sub(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
          a[0] * b[1] - a[1] * b[0]};
}

double norm(const Vec3& a) {
  return std::sqrt(a[0] * a[0] + a[1] * a[1] + a[2] * a[2]);
}

}  // namespace

void TriangleMesh::check_indices() const {
  for (const auto& t : triangles) {
    for (auto idx : t) {
      if (idx >= vertices.size()) {
        throw ParameterError("triangle index out of range");
      }
    }
  }
}

double TriangleMesh::triangle_area(std::size_t t) const {
  const auto& tri = triangles[t];
  const Vec3 e1 = sub(vertices[tri[1]], vertices[tri[0]]);
  const Vec3 e2 = sub(vertices[tri[2]], vertices[tri[0]]);
  return 0.5 * norm(cross(e1, e2));
}

double TriangleMesh::total_area() const {
  double a = 0.0;
  for (std::size_t t = 0; t < triangles.size(); ++t) a += triangle_area(t);
  return a;
}

void TriangleMesh::drop_degenerate() {
  std::vector<std::array<std::uint32_t, 3>> kept;
  kept.reserve(triangles.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    const auto& tri = triangles[t];
    if (tri[0] == tri[1] || tri[1] == tri[2] || tri[0] == tri[2]) continue;
    if (triangle_area(t) <= 0.0) continue;
    kept.push_back(tri);
  }
  triangles = std::move(kept);
}

TriangleMesh make_icosphere(const Vec3& center, double radius,
                            int subdivisions) {
  const double phi = (1.0 + std::sqrt(5.0)) / 2.0;
  TriangleMesh mesh;
  mesh.vertices = {
      {-1, phi, 0}, {1, phi, 0},   {-1, -phi, 0}, {1, -phi, 0},
      {0, -1, phi}, {0, 1, phi},   {0, -1, -phi}, {0, 1, -phi},
      {phi, 0, -1}, {phi, 0, 1},   {-phi, 0, -1}, {-phi, 0, 1},
  };
  mesh.triangles = {
      {0, 11, 5}, {0, 5, 1},   {0, 1, 7},   {0, 7, 10}, {0, 10, 11},
      {1, 5, 9},  {5, 11, 4},  {11, 10, 2}, {10, 7, 6}, {7, 1, 8},
      {3, 9, 4},  {3, 4, 2},   {3, 2, 6},   {3, 6, 8},  {3, 8, 9},
      {4, 9, 5},  {2, 4, 11},  {6, 2, 10},  {8, 6, 7},  {9, 8, 1},
  };

  auto normalize = [](Vec3 v) {
    const double n = norm(v);
    return Vec3{v[0] / n, v[1] / n, v[2] / n};
  };
  for (auto& v : mesh.vertices) v = normalize(v);

  for (int s = 0; s < subdivisions; ++s) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
    auto midpoint = [&](std::uint32_t i, std::uint32_t j) {
      const auto key = std::minmax(i, j);
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      const Vec3& a = mesh.vertices[i];
      const Vec3& b = mesh.vertices[j];
      Vec3 m = normalize(
          {(a[0] + b[0]) / 2, (a[1] + b[1]) / 2, (a[2] + b[2]) / 2});
      const auto idx = static_cast<std::uint32_t>(mesh.vertices.size());
      mesh.vertices.push_back(m);
      midpoints.emplace(key, idx);
      return idx;
    };
    std::vector<std::array<std::uint32_t, 3>> next;
    next.reserve(mesh.triangles.size() * 4);
    for (const auto& t : mesh.triangles) {
      const std::uint32_t ab = midpoint(t[0], t[1]);
      const std::uint32_t bc = midpoint(t[1], t[2]);
      const std::uint32_t ca = midpoint(t[2], t[0]);
      next.push_back({t[0], ab, ca});
      next.push_back({t[1], bc, ab});
      next.push_back({t[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    mesh.triangles = std::move(next);
  }

  for (auto& v : mesh.vertices) {
    v = {center[0] + radius * v[0], center[1] + radius * v[1],
         center[2] + radius * v[2]};
  }
  return mesh;
}

TriangleMesh make_box_mesh(const Vec3& c, const Vec3& h) {
  TriangleMesh mesh;
  for (int k = 0; k < 8; ++k) {
    mesh.vertices.push_back({c[0] + ((k & 1) ? h[0] : -h[0]),
                             c[1] + ((k & 2) ? h[1] : -h[1]),
                             c[2] + ((k & 4) ? h[2] : -h[2])});
  }
  // Outward-facing quads split into triangles.
  const int quads[6][4] = {
      {0, 2, 3, 1},  // z-
      {4, 5, 7, 6},  // z+
      {0, 1, 5, 4},  // y-
      {2, 6, 7, 3},  // y+
      {0, 4, 6, 2},  // x-
      {1, 3, 7, 5},  // x+
  };
  for (const auto& q : quads) {
    mesh.triangles.push_back({static_cast<std::uint32_t>(q[0]),
                              static_cast<std::uint32_t>(q[1]),
                              static_cast<std::uint32_t>(q[2])});
    mesh.triangles.push_back({static_cast<std::uint32_t>(q[0]),
                              static_cast<std::uint32_t>(q[2]),
                              static_cast<std::uint32_t>(q[3])});
  }
  return mesh;
}

}  // namespace wala
