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

#include <memory>
#include <string>

#include "wala/grid.hpp"

namespace wala {

// Analytic shape: a primitive or a CSG combination of two sub-shapes.
// Distances follow the min/max CSG rules on signed distances.
struct ShapeSpec {
  enum class Kind { Sphere, Box, Torus, Union, Intersection, Difference };

  Kind kind = Kind::Sphere;

  // Primitive parameters.
  Vec3 center = {0, 0, 0};
  double radius = 0.0;        // sphere
  Vec3 half_extents = {0, 0, 0};  // box
  double major_radius = 0.0;  // torus (ring radius, around the y axis)
  double minor_radius = 0.0;  // torus (tube radius)

  // CSG children.
  std::shared_ptr<ShapeSpec> a;
  std::shared_ptr<ShapeSpec> b;

  // Throws ParameterError on non-positive radii/extents or CSG depth > 8.
  void validate() const;

  // Signed distance at p, negative inside.
  double distance(const Vec3& p) const;

  static ShapeSpec sphere(Vec3 c, double r);
  static ShapeSpec box(Vec3 c, Vec3 half);
  static ShapeSpec torus(Vec3 c, double major, double minor);
  static ShapeSpec csg(Kind op, ShapeSpec lhs, ShapeSpec rhs);

  std::string to_json() const;
  static ShapeSpec from_json(const std::string& text);

 private:
  void validate_depth(int depth) const;
};

}  // namespace wala
