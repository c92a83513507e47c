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

#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "wala/grid.hpp"

namespace wala {

struct TriangleMesh {
  std::vector<Vec3> vertices;
  std::vector<std::array<std::uint32_t, 3>> triangles;

  bool empty() const { return triangles.empty(); }

  // Throws ParameterError on out-of-range indices.
  void check_indices() const;

  // Removes triangles with repeated vertices or zero area.
  void drop_degenerate();

  double triangle_area(std::size_t t) const;
  double total_area() const;
};

using PointCloud = std::vector<Vec3>;

// Unit icosphere refined `subdivisions` times, then scaled/translated.
// Watertight by construction; used as a mesh-pipeline test source.
TriangleMesh make_icosphere(const Vec3& center, double radius,
                            int subdivisions);

// Axis-aligned closed box mesh (12 triangles, outward orientation).
TriangleMesh make_box_mesh(const Vec3& center, const Vec3& half_extents);

}  // namespace wala
