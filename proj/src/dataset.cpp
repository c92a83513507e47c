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

#include "wala/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace wala {

namespace {

ShapeSpec random_shape(const std::string& family, const GridSpec& spec,
                       Rng& rng) {
  const double half = 0.5 * spec.spacing * spec.resolution;
  const double jitter = 0.15 * half;
  auto centre = [&] {
    return Vec3{rng.uniform(-jitter, jitter), rng.uniform(-jitter, jitter),
                rng.uniform(-jitter, jitter)};
  };
  // Feature sizes kept at >= 4 voxels so occupancy and meshing stay sane.
  const double min_feat = 4.0 * spec.spacing;

  if (family == "sphere") {
    return ShapeSpec::sphere(centre(),
                             rng.uniform(std::max(0.25 * half, min_feat),
                                         0.6 * half));
  }
  if (family == "box") {
    auto ext = [&] {
      return rng.uniform(std::max(0.2 * half, min_feat), 0.55 * half);
    };
    return ShapeSpec::box(centre(), {ext(), ext(), ext()});
  }
  if (family == "torus") {
    const double major = rng.uniform(std::max(0.3 * half, 2.0 * min_feat),
                                     0.55 * half);
    const double minor =
        rng.uniform(std::max(0.12 * half, min_feat), 0.45 * major);
    return ShapeSpec::torus(centre(), major, minor);
  }
  if (family == "twosphere") {
    const double r1 = rng.uniform(std::max(0.2 * half, min_feat), 0.4 * half);
    const double r2 = rng.uniform(std::max(0.2 * half, min_feat), 0.4 * half);
    const double off = rng.uniform(0.15 * half, 0.4 * half);
    return ShapeSpec::csg(
        ShapeSpec::Kind::Union,
        ShapeSpec::sphere({-off, 0.0, 0.0}, r1),
        ShapeSpec::sphere({off, rng.uniform(-0.1 * half, 0.1 * half), 0.0},
                          r2));
  }
  if (family == "hollowbox") {
    // Box with an internal spherical cavity; wall thickness stays above the
    // minimum feature size.
    const double outer = rng.uniform(std::max(0.45 * half, 3.0 * min_feat),
                                     0.55 * half);
    const double cavity = rng.uniform(0.5 * outer, 0.7 * outer);
    return ShapeSpec::csg(ShapeSpec::Kind::Difference,
                          ShapeSpec::box({0.0, 0.0, 0.0}, {outer, outer, outer}),
                          ShapeSpec::sphere({0.0, 0.0, 0.0}, cavity));
  }
  throw ParameterError("unknown shape family '" + family + "'");
}

void rotate_point(double& x, double& y, double& z, int axis) {
  // +90 degrees, matching rotate_cube's index rule.
  double nx = x, ny = y, nz = z;
  if (axis == 2) {
    nx = -y;
    ny = x;
  } else if (axis == 0) {
    ny = -z;
    nz = y;
  } else {
    nz = -x;
    nx = z;
  }
  x = nx;
  y = ny;
  z = nz;
}

}  // namespace

std::vector<std::pair<ShapeSpec, ManifestRecord>> generate_synthetic_corpus(
    const std::map<std::string, int>& recipe, const GridSpec& spec,
    std::uint64_t seed) {
  std::vector<std::pair<ShapeSpec, ManifestRecord>> out;
  Rng root = Rng(seed).child("corpus");
  for (const auto& [family, count] : recipe) {
    if (count < 0) throw ParameterError("negative count for " + family);
    Rng frng = root.child(family);
    for (int i = 0; i < count; ++i) {
      Rng srng = frng.child(static_cast<std::uint64_t>(i));
      ShapeSpec shape = random_shape(family, spec, srng);
      shape.validate();
      ManifestRecord rec;
      rec.id = family + "_" + std::to_string(i);
      rec.dataset_tag = family;
      rec.split = "train";
      out.emplace_back(std::move(shape), std::move(rec));
    }
  }
  return out;
}

void split_corpus(std::vector<ManifestRecord>& records, double test_fraction,
                  std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw ParameterError("test fraction must lie in (0,1)");
  }
  std::map<std::string, std::vector<std::size_t>> by_tag;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].dataset_tag.empty()) {
      throw ParameterError("record without a dataset tag");
    }
    by_tag[records[i].dataset_tag].push_back(i);
  }
  Rng root = Rng(seed).child("split");
  for (auto& [tag, idxs] : by_tag) {
    Rng trng = root.child(tag);
    for (std::size_t i = idxs.size(); i > 1; --i) {
      const std::size_t j = static_cast<std::size_t>(trng.uniform_index(i));
      std::swap(idxs[i - 1], idxs[j]);
    }
    const std::size_t n_test = static_cast<std::size_t>(
        std::floor(static_cast<double>(idxs.size()) * test_fraction));
    for (std::size_t i = 0; i < idxs.size(); ++i) {
      records[idxs[i]].split = i < n_test ? "test" : "train";
    }
  }
}

std::vector<ManifestRecord> balanced_sample(
    const std::vector<ManifestRecord>& records, int cap, std::uint64_t seed) {
  if (cap < 1) throw ParameterError("cap must be >= 1");
  std::map<std::string, std::vector<const ManifestRecord*>> by_tag;
  for (const auto& r : records) by_tag[r.dataset_tag].push_back(&r);
  if (by_tag.empty()) throw ParameterError("no records to sample from");

  Rng root = Rng(seed).child("balanced");
  std::vector<ManifestRecord> out;
  out.reserve(by_tag.size() * static_cast<std::size_t>(cap));
  for (auto& [tag, members] : by_tag) {
    Rng trng = root.child(tag);
    auto shuffled = [&](Rng& r) {
      std::vector<const ManifestRecord*> s = members;
      for (std::size_t i = s.size(); i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(r.uniform_index(i));
        std::swap(s[i - 1], s[j]);
      }
      return s;
    };
    if (members.size() >= static_cast<std::size_t>(cap)) {
      const auto s = shuffled(trng);
      for (int i = 0; i < cap; ++i) out.push_back(*s[static_cast<std::size_t>(i)]);
    } else {
      int remaining = cap;
      while (remaining > 0) {
        const auto s = shuffled(trng);  // reshuffle each duplication cycle
        const int take = std::min<int>(remaining, static_cast<int>(s.size()));
        for (int i = 0; i < take; ++i) {
          out.push_back(*s[static_cast<std::size_t>(i)]);
        }
        remaining -= take;
      }
    }
  }
  return out;
}

SdfGrid rotate_augment(const SdfGrid& grid, int axis, int quarter_turns) {
  Cube cube(grid.spec.resolution);
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    cube.v[i] = static_cast<double>(grid.values[i]);
  }
  const Cube rotated = rotate_cube(cube, axis, quarter_turns);
  std::vector<float> values(rotated.v.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<float>(rotated.v[i]);
  }
  return SdfGrid(grid.spec, std::move(values));
}

BinaryGrid rotate_augment(const BinaryGrid& grid, int axis, int quarter_turns) {
  Cube cube(grid.resolution);
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    cube.v[i] = grid.values[i];
  }
  const Cube rotated = rotate_cube(cube, axis, quarter_turns);
  BinaryGrid out;
  out.resolution = grid.resolution;
  out.values.resize(rotated.v.size());
  for (std::size_t i = 0; i < out.values.size(); ++i) {
    out.values[i] = rotated.v[i] != 0.0 ? 1 : 0;
  }
  return out;
}

PointCloud rotate_augment(const PointCloud& points, int axis, int quarter_turns,
                          const Vec3& center) {
  if (axis < 0 || axis > 2) throw ParameterError("axis must be 0, 1 or 2");
  const int turns = ((quarter_turns % 4) + 4) % 4;
  PointCloud out = points;
  for (auto& p : out) {
    double x = p[0] - center[0];
    double y = p[1] - center[1];
    double z = p[2] - center[2];
    for (int t = 0; t < turns; ++t) rotate_point(x, y, z, axis);
    p = {x + center[0], y + center[1], z + center[2]};
  }
  return out;
}

DiffusibleTree rotate_augment(const DiffusibleTree& tree, int axis,
                              int quarter_turns) {
  const WaveletDecomposition decomp = unpack_tree(tree);
  return pack_tree(rotate_decomposition(decomp, axis, quarter_turns));
}

Condition rotate_augment(const Condition& cond, int axis, int quarter_turns) {
  const int turns = ((quarter_turns % 4) + 4) % 4;
  if (cond.is_none() || turns == 0) return cond;

  Condition out = cond;
  if (cond.kind == Condition::Kind::Voxel) {
    if (cond.feature.size() != 4097) {
      throw ParameterError("voxel condition must have dimension 4097");
    }
    Cube cube(16);
    std::copy_n(cond.feature.begin(), 4096, cube.v.begin());
    const Cube rotated = rotate_cube(cube, axis, turns);
    std::copy(rotated.v.begin(), rotated.v.end(), out.feature.begin());
    return out;  // occupancy fraction is rotation invariant
  }

  if (cond.feature.size() != 518) {
    throw ParameterError("point-cloud condition must have dimension 518");
  }
  // Histogram bins permute like an 8^3 lattice; moments rotate about the
  // cube centre (0.5, 0.5, 0.5).
  Cube hist(8);
  std::copy_n(cond.feature.begin(), 512, hist.v.begin());
  const Cube rotated = rotate_cube(hist, axis, turns);
  std::copy(rotated.v.begin(), rotated.v.end(), out.feature.begin());

  double cx = cond.feature[512] - 0.5;
  double cy = cond.feature[513] - 0.5;
  double cz = cond.feature[514] - 0.5;
  double sx = cond.feature[515], sy = cond.feature[516], sz = cond.feature[517];
  for (int t = 0; t < turns; ++t) {
    rotate_point(cx, cy, cz, axis);
    // Standard deviations permute with the axes (reflection-invariant).
    double nx = sx, ny = sy, nz = sz;
    if (axis == 2) {
      nx = sy;
      ny = sx;
    } else if (axis == 0) {
      ny = sz;
      nz = sy;
    } else {
      nz = sx;
      nx = sz;
    }
    sx = nx;
    sy = ny;
    sz = nz;
  }
  out.feature[512] = cx + 0.5;
  out.feature[513] = cy + 0.5;
  out.feature[514] = cz + 0.5;
  out.feature[515] = sx;
  out.feature[516] = sy;
  out.feature[517] = sz;
  return out;
}

Condition encode_pointcloud_condition(const PointCloud& points_in) {
  if (points_in.empty()) throw ParameterError("point cloud is empty");

  // Canonical order makes the floating-point sums, and hence the feature,
  // exactly permutation invariant.
  PointCloud points = points_in;
  std::sort(points.begin(), points.end());

  Vec3 lo = points[0], hi = points[0];
  for (const auto& p : points) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  double extent = 0.0;
  for (int a = 0; a < 3; ++a) extent = std::max(extent, hi[a] - lo[a]);
  const Vec3 mid = {(lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2,
                    (lo[2] + hi[2]) / 2};

  Condition cond;
  cond.kind = Condition::Kind::PointCloud;
  cond.feature.assign(518, 0.0);

  const double inv = extent > 0.0 ? 1.0 / extent : 0.0;
  double cx = 0.0, cy = 0.0, cz = 0.0;
  std::vector<Vec3> unit(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    // Normalized coordinates in [0,1], degenerate clouds land at the centre.
    const double ux = extent > 0.0
                          ? (points[i][0] - mid[0]) * inv + 0.5
                          : 0.5;
    const double uy = extent > 0.0
                          ? (points[i][1] - mid[1]) * inv + 0.5
                          : 0.5;
    const double uz = extent > 0.0
                          ? (points[i][2] - mid[2]) * inv + 0.5
                          : 0.5;
    unit[i] = {ux, uy, uz};
    cx += ux;
    cy += uy;
    cz += uz;
    const int bx = std::clamp(static_cast<int>(ux * 8.0), 0, 7);
    const int by = std::clamp(static_cast<int>(uy * 8.0), 0, 7);
    const int bz = std::clamp(static_cast<int>(uz * 8.0), 0, 7);
    cond.feature[static_cast<std::size_t>(bx + 8 * (by + 8 * bz))] += 1.0;
  }
  const double n = static_cast<double>(points.size());
  for (int b = 0; b < 512; ++b) cond.feature[static_cast<std::size_t>(b)] /= n;
  cx /= n;
  cy /= n;
  cz /= n;
  double vx = 0.0, vy = 0.0, vz = 0.0;
  for (const auto& u : unit) {
    vx += (u[0] - cx) * (u[0] - cx);
    vy += (u[1] - cy) * (u[1] - cy);
    vz += (u[2] - cz) * (u[2] - cz);
  }
  cond.feature[512] = cx;
  cond.feature[513] = cy;
  cond.feature[514] = cz;
  cond.feature[515] = std::sqrt(vx / n);
  cond.feature[516] = std::sqrt(vy / n);
  cond.feature[517] = std::sqrt(vz / n);
  return cond;
}

Condition encode_voxel_condition(const BinaryGrid& occ16) {
  if (occ16.resolution != 16) {
    throw ParameterError("voxel condition requires a 16^3 grid");
  }
  Condition cond;
  cond.kind = Condition::Kind::Voxel;
  cond.feature.assign(4097, 0.0);
  std::size_t count = 0;
  for (std::size_t i = 0; i < occ16.values.size(); ++i) {
    cond.feature[i] = occ16.values[i] != 0 ? 1.0 : 0.0;
    count += occ16.values[i] != 0;
  }
  cond.feature[4096] =
      static_cast<double>(count) / static_cast<double>(occ16.values.size());
  return cond;
}

}  // namespace wala
