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

#include "wala/shapes.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace wala {

namespace {

using nlohmann::json;

json shape_to_json(const ShapeSpec& s) {
  json j;
  switch (s.kind) {
    case ShapeSpec::Kind::Sphere:
      j["kind"] = "sphere";
      j["center"] = s.center;
      j["radius"] = s.radius;
      break;
    case ShapeSpec::Kind::Box:
      j["kind"] = "box";
      j["center"] = s.center;
      j["half_extents"] = s.half_extents;
      break;
    case ShapeSpec::Kind::Torus:
      j["kind"] = "torus";
      j["center"] = s.center;
      j["major_radius"] = s.major_radius;
      j["minor_radius"] = s.minor_radius;
      break;
    case ShapeSpec::Kind::Union:
    case ShapeSpec::Kind::Intersection:
    case ShapeSpec::Kind::Difference:
      j["kind"] = s.kind == ShapeSpec::Kind::Union ? "union"
                  : s.kind == ShapeSpec::Kind::Intersection ? "intersection"
                                                            : "difference";
      j["a"] = shape_to_json(*s.a);
      j["b"] = shape_to_json(*s.b);
      break;
  }
  return j;
}

Vec3 vec3_from(const json& j) {
  if (!j.is_array() || j.size() != 3) {
    throw DataError("expected a 3-element array in shape JSON");
  }
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

ShapeSpec shape_from_json(const json& j) {
  if (!j.contains("kind")) throw DataError("shape JSON missing 'kind'");
  const std::string kind = j.at("kind").get<std::string>();
  ShapeSpec s;
  if (kind == "sphere") {
    s = ShapeSpec::sphere(vec3_from(j.at("center")),
                          j.at("radius").get<double>());
  } else if (kind == "box") {
    s = ShapeSpec::box(vec3_from(j.at("center")),
                       vec3_from(j.at("half_extents")));
  } else if (kind == "torus") {
    s = ShapeSpec::torus(vec3_from(j.at("center")),
                         j.at("major_radius").get<double>(),
                         j.at("minor_radius").get<double>());
  } else if (kind == "union" || kind == "intersection" ||
             kind == "difference") {
    const auto op = kind == "union" ? ShapeSpec::Kind::Union
                    : kind == "intersection" ? ShapeSpec::Kind::Intersection
                                             : ShapeSpec::Kind::Difference;
    s = ShapeSpec::csg(op, shape_from_json(j.at("a")),
                       shape_from_json(j.at("b")));
  } else {
    throw DataError("unknown shape kind '" + kind + "'");
  }
  return s;
}

}  // namespace

void ShapeSpec::validate() const { validate_depth(1); }

void ShapeSpec::validate_depth(int depth) const {
  if (depth > 8) throw ParameterError("CSG tree deeper than 8 levels");
  switch (kind) {
    case Kind::Sphere:
      if (!(radius > 0.0)) throw ParameterError("sphere radius must be > 0");
      break;
    case Kind::Box:
      for (double h : half_extents) {
        if (!(h > 0.0)) throw ParameterError("box half-extents must be > 0");
      }
      break;
    case Kind::Torus:
      if (!(major_radius > 0.0) || !(minor_radius > 0.0)) {
        throw ParameterError("torus radii must be > 0");
      }
      break;
    case Kind::Union:
    case Kind::Intersection:
    case Kind::Difference:
      if (!a || !b) throw ParameterError("CSG node missing operands");
      a->validate_depth(depth + 1);
      b->validate_depth(depth + 1);
      break;
  }
}

double ShapeSpec::distance(const Vec3& p) const {
  switch (kind) {
    case Kind::Sphere: {
      const double dx = p[0] - center[0];
      const double dy = p[1] - center[1];
      const double dz = p[2] - center[2];
      return std::sqrt(dx * dx + dy * dy + dz * dz) - radius;
    }
    case Kind::Box: {
      const double qx = std::abs(p[0] - center[0]) - half_extents[0];
      const double qy = std::abs(p[1] - center[1]) - half_extents[1];
      const double qz = std::abs(p[2] - center[2]) - half_extents[2];
      const double ox = std::max(qx, 0.0);
      const double oy = std::max(qy, 0.0);
      const double oz = std::max(qz, 0.0);
      const double outside = std::sqrt(ox * ox + oy * oy + oz * oz);
      const double inside = std::min(std::max({qx, qy, qz}), 0.0);
      return outside + inside;
    }
    case Kind::Torus: {
      // Ring in the xz-plane around the y axis.
      const double dx = p[0] - center[0];
      const double dy = p[1] - center[1];
      const double dz = p[2] - center[2];
      const double q = std::sqrt(dx * dx + dz * dz) - major_radius;
      return std::sqrt(q * q + dy * dy) - minor_radius;
    }
    case Kind::Union:
      return std::min(a->distance(p), b->distance(p));
    case Kind::Intersection:
      return std::max(a->distance(p), b->distance(p));
    case Kind::Difference:
      return std::max(a->distance(p), -b->distance(p));
  }
  return 0.0;
}

ShapeSpec ShapeSpec::sphere(Vec3 c, double r) {
  ShapeSpec s;
  s.kind = Kind::Sphere;
  s.center = c;
  s.radius = r;
  return s;
}

ShapeSpec ShapeSpec::box(Vec3 c, Vec3 half) {
  ShapeSpec s;
  s.kind = Kind::Box;
  s.center = c;
  s.half_extents = half;
  return s;
}

ShapeSpec ShapeSpec::torus(Vec3 c, double major, double minor) {
  ShapeSpec s;
  s.kind = Kind::Torus;
  s.center = c;
  s.major_radius = major;
  s.minor_radius = minor;
  return s;
}

ShapeSpec ShapeSpec::csg(Kind op, ShapeSpec lhs, ShapeSpec rhs) {
  ShapeSpec s;
  s.kind = op;
  s.a = std::make_shared<ShapeSpec>(std::move(lhs));
  s.b = std::make_shared<ShapeSpec>(std::move(rhs));
  return s;
}

std::string ShapeSpec::to_json() const { return shape_to_json(*this).dump(); }

ShapeSpec ShapeSpec::from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw DataError(std::string("invalid shape JSON: ") + e.what());
  }
  ShapeSpec s = shape_from_json(j);
  s.validate();
  return s;
}

}  // namespace wala
