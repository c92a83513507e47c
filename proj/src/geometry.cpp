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

#include "wala/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>
#include <vector>

#include "mc_tables.hpp"

namespace wala {

namespace {

double dot(const Vec3& a, const Vec3& b) {
  return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Vec3 sub(const Vec3& a, const Vec3& b) {
  return {a[0] - b[0], a[1] - b[1], a[2] - b[2]};
}

// Squared distance from point p to triangle (a,b,c); Ericson's region walk.
double point_triangle_dist2(const Vec3& p, const Vec3& a, const Vec3& b,
                            const Vec3& c) {
  const Vec3 ab = sub(b, a);
  const Vec3 ac = sub(c, a);
  const Vec3 ap = sub(p, a);
  const double d1 = dot(ab, ap);
  const double d2 = dot(ac, ap);
  if (d1 <= 0.0 && d2 <= 0.0) return dot(ap, ap);

  const Vec3 bp = sub(p, b);
  const double d3 = dot(ab, bp);
  const double d4 = dot(ac, bp);
  if (d3 >= 0.0 && d4 <= d3) return dot(bp, bp);

  const double vc = d1 * d4 - d3 * d2;
  if (vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0) {
    const double v = d1 / (d1 - d3);
    const Vec3 q = {a[0] + v * ab[0], a[1] + v * ab[1], a[2] + v * ab[2]};
    const Vec3 pq = sub(p, q);
    return dot(pq, pq);
  }

  const Vec3 cp = sub(p, c);
  const double d5 = dot(ab, cp);
  const double d6 = dot(ac, cp);
  if (d6 >= 0.0 && d5 <= d6) return dot(cp, cp);

  const double vb = d5 * d2 - d1 * d6;
  if (vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0) {
    const double w = d2 / (d2 - d6);
    const Vec3 q = {a[0] + w * ac[0], a[1] + w * ac[1], a[2] + w * ac[2]};
    const Vec3 pq = sub(p, q);
    return dot(pq, pq);
  }

  const double va = d3 * d6 - d5 * d4;
  if (va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0) {
    const double w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
    const Vec3 q = {b[0] + w * (c[0] - b[0]), b[1] + w * (c[1] - b[1]),
                    b[2] + w * (c[2] - b[2])};
    const Vec3 pq = sub(p, q);
    return dot(pq, pq);
  }

  const double denom = 1.0 / (va + vb + vc);
  const double v = vb * denom;
  const double w = vc * denom;
  const Vec3 q = {a[0] + ab[0] * v + ac[0] * w, a[1] + ab[1] * v + ac[1] * w,
                  a[2] + ab[2] * v + ac[2] * w};
  const Vec3 pq = sub(p, q);
  return dot(pq, pq);
}

// Parity of ray crossings along one axis. `axis` is the ray direction; u,v
// are the two orthogonal axes. Rays pass through voxel centres nudged by an
// irrational sub-voxel offset so they never graze triangle edges exactly.
void axis_parity(const TriangleMesh& mesh, const GridSpec& spec, int axis,
                 std::vector<std::uint8_t>& inside) {
  const int n = spec.resolution;
  const int u = (axis + 1) % 3;
  const int v = (axis + 2) % 3;
  const double eps = spec.spacing * 2.36067977e-4;  // irrational tie-breaker

  // crossings[row] = sorted ray parameters along `axis` for lattice row
  // (iu, iv); row index = iu + n*iv.
  std::vector<std::vector<double>> crossings(
      static_cast<std::size_t>(n) * static_cast<std::size_t>(n));

  for (const auto& tri : mesh.triangles) {
    const Vec3& pa = mesh.vertices[tri[0]];
    const Vec3& pb = mesh.vertices[tri[1]];
    const Vec3& pc = mesh.vertices[tri[2]];
    const double au = pa[u], av = pa[v];
    const double bu = pb[u], bv = pb[v];
    const double cu = pc[u], cv = pc[v];
    const double lo_u = std::min({au, bu, cu});
    const double hi_u = std::max({au, bu, cu});
    const double lo_v = std::min({av, bv, cv});
    const double hi_v = std::max({av, bv, cv});

    const double org_u = spec.origin[u] + eps;
    const double org_v = spec.origin[v] + eps * 0.61803398875;
    int iu0 = static_cast<int>(std::ceil((lo_u - org_u) / spec.spacing));
    int iu1 = static_cast<int>(std::floor((hi_u - org_u) / spec.spacing));
    int iv0 = static_cast<int>(std::ceil((lo_v - org_v) / spec.spacing));
    int iv1 = static_cast<int>(std::floor((hi_v - org_v) / spec.spacing));
    iu0 = std::max(iu0, 0);
    iv0 = std::max(iv0, 0);
    iu1 = std::min(iu1, n - 1);
    iv1 = std::min(iv1, n - 1);

    const double det = (bu - au) * (cv - av) - (cu - au) * (bv - av);
    if (det == 0.0) continue;  // projection degenerate, no parity change

    for (int iv_ = iv0; iv_ <= iv1; ++iv_) {
      const double pv = org_v + spec.spacing * iv_;
      for (int iu_ = iu0; iu_ <= iu1; ++iu_) {
        const double pu = org_u + spec.spacing * iu_;
        const double w0 =
            ((bu - pu) * (cv - pv) - (cu - pu) * (bv - pv)) / det;
        const double w1 =
            ((cu - pu) * (av - pv) - (au - pu) * (cv - pv)) / det;
        const double w2 = 1.0 - w0 - w1;
        if (w0 < 0.0 || w1 < 0.0 || w2 < 0.0) continue;
        const double t = w0 * pa[axis] + w1 * pb[axis] + w2 * pc[axis];
        crossings[static_cast<std::size_t>(iu_) +
                  static_cast<std::size_t>(n) * iv_]
            .push_back(t);
      }
    }
  }

  for (int iv_ = 0; iv_ < n; ++iv_) {
    for (int iu_ = 0; iu_ < n; ++iu_) {
      auto& row = crossings[static_cast<std::size_t>(iu_) +
                            static_cast<std::size_t>(n) * iv_];
      std::sort(row.begin(), row.end());
      std::size_t next = 0;
      bool in = false;
      for (int ia = 0; ia < n; ++ia) {
        const double coord = spec.origin[axis] + spec.spacing * ia;
        while (next < row.size() && row[next] < coord) {
          in = !in;
          ++next;
        }
        int idx[3];
        idx[axis] = ia;
        idx[u] = iu_;
        idx[v] = iv_;
        if (in) {
          inside[spec.index(idx[0], idx[1], idx[2])] += 1;
        }
      }
    }
  }
}

struct EdgeKey {
  std::int64_t cell;
  int axis;
  bool operator==(const EdgeKey& o) const {
    return cell == o.cell && axis == o.axis;
  }
};

struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& k) const {
    return std::hash<std::int64_t>()(k.cell * 3 + k.axis);
  }
};

}  // namespace

SdfGrid sdf_from_shape(const ShapeSpec& shape, const GridSpec& spec) {
  shape.validate();
  spec.validate();
  const int n = spec.resolution;
  std::vector<float> values(spec.voxel_count());
  const double tau = spec.truncation;
  parallel_chunks(static_cast<std::size_t>(n), 1, [&](std::size_t k0,
                                                      std::size_t k1) {
    for (std::size_t k = k0; k < k1; ++k) {
      for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
          const Vec3 p = spec.position(i, j, static_cast<int>(k));
          const double d = shape.distance(p);
          values[spec.index(i, j, static_cast<int>(k))] =
              static_cast<float>(std::clamp(d, -tau, tau));
        }
      }
    }
  });
  return SdfGrid(spec, std::move(values));
}

SdfGrid voxelize_mesh(const TriangleMesh& mesh, const GridSpec& spec) {
  if (mesh.empty()) throw ParameterError("cannot voxelize an empty mesh");
  mesh.check_indices();
  spec.validate();
  const int n = spec.resolution;
  const double tau = spec.truncation;

  // Unsigned narrow-band distance: exact point-triangle distance for voxels
  // within tau (plus one voxel of slack) of each triangle's box.
  std::vector<double> dist2(spec.voxel_count(),
                            std::numeric_limits<double>::infinity());
  const double band = tau + spec.spacing;
  for (const auto& tri : mesh.triangles) {
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    int lo[3], hi[3];
    for (int ax = 0; ax < 3; ++ax) {
      const double mn = std::min({a[ax], b[ax], c[ax]}) - band;
      const double mx = std::max({a[ax], b[ax], c[ax]}) + band;
      lo[ax] = std::max(
          0, static_cast<int>(std::ceil((mn - spec.origin[ax]) / spec.spacing)));
      hi[ax] = std::min(
          n - 1,
          static_cast<int>(std::floor((mx - spec.origin[ax]) / spec.spacing)));
    }
    for (int k = lo[2]; k <= hi[2]; ++k) {
      for (int j = lo[1]; j <= hi[1]; ++j) {
        for (int i = lo[0]; i <= hi[0]; ++i) {
          const Vec3 p = spec.position(i, j, k);
          const double d2 = point_triangle_dist2(p, a, b, c);
          auto& cell = dist2[spec.index(i, j, k)];
          if (d2 < cell) cell = d2;
        }
      }
    }
  }

  // Sign by 3-axis ray parity with a majority vote.
  std::vector<std::uint8_t> votes(spec.voxel_count(), 0);
  for (int axis = 0; axis < 3; ++axis) axis_parity(mesh, spec, axis, votes);

  std::size_t disagreements = 0;
  for (auto v : votes) {
    if (v == 1 || v == 2) ++disagreements;
  }
  if (disagreements >
      static_cast<std::size_t>(0.001 * static_cast<double>(spec.voxel_count()))) {
    throw GeometryError(
        "mesh does not look watertight: axis parity votes disagree on " +
        std::to_string(disagreements) + " voxels");
  }

  std::vector<float> values(spec.voxel_count());
  for (std::size_t idx = 0; idx < values.size(); ++idx) {
    const double d = std::min(std::sqrt(dist2[idx]), tau);
    values[idx] = static_cast<float>(votes[idx] >= 2 ? -d : d);
  }
  return SdfGrid(spec, std::move(values));
}

TriangleMesh marching_cubes(const SdfGrid& grid, double iso) {
  const double tau = grid.spec.truncation;
  if (!(iso > -tau && iso < tau)) {
    throw ParameterError("iso level must lie strictly inside (-tau, tau)");
  }
  const int n = grid.spec.resolution;

  bool any_in = false, any_out = false;
  for (float v : grid.values) {
    if (v <= iso) any_in = true;
    if (v > iso) any_out = true;
    if (any_in && any_out) break;
  }
  if (!any_in || !any_out) {
    throw DataError("grid never crosses the iso level; surface is empty");
  }

  TriangleMesh mesh;
  std::unordered_map<EdgeKey, std::uint32_t, EdgeKeyHash> edge_vertex;

  // Welded vertex on the edge leaving cell-corner (i,j,k) along `axis`.
  auto vertex_on_edge = [&](int i, int j, int k, int axis) {
    const EdgeKey key{static_cast<std::int64_t>(grid.spec.index(i, j, k)),
                      axis};
    auto it = edge_vertex.find(key);
    if (it != edge_vertex.end()) return it->second;
    int i2 = i + (axis == 0), j2 = j + (axis == 1), k2 = k + (axis == 2);
    const double v0 = grid.at(i, j, k);
    const double v1 = grid.at(i2, j2, k2);
    double t = 0.5;
    if (v1 != v0) t = (iso - v0) / (v1 - v0);
    t = std::clamp(t, 0.0, 1.0);
    const Vec3 p0 = grid.spec.position(i, j, k);
    const Vec3 p1 = grid.spec.position(i2, j2, k2);
    const Vec3 p = {p0[0] + t * (p1[0] - p0[0]), p0[1] + t * (p1[1] - p0[1]),
                    p0[2] + t * (p1[2] - p0[2])};
    const auto idx = static_cast<std::uint32_t>(mesh.vertices.size());
    mesh.vertices.push_back(p);
    edge_vertex.emplace(key, idx);
    return idx;
  };

  for (int k = 0; k < n - 1; ++k) {
    for (int j = 0; j < n - 1; ++j) {
      for (int i = 0; i < n - 1; ++i) {
        int cube = 0;
        for (int c = 0; c < 8; ++c) {
          const double v = grid.at(i + mc::corner_offsets[c][0],
                                   j + mc::corner_offsets[c][1],
                                   k + mc::corner_offsets[c][2]);
          if (v <= iso) cube |= 1 << c;  // value == iso counts as inside
        }
        if (mc::edge_table[cube] == 0) continue;

        std::uint32_t everts[12];
        for (int e = 0; e < 12; ++e) {
          if (!(mc::edge_table[cube] & (1 << e))) continue;
          const int c0 = mc::edge_corners[e][0];
          const int c1 = mc::edge_corners[e][1];
          const int* o0 = mc::corner_offsets[c0];
          const int* o1 = mc::corner_offsets[c1];
          const int axis =
              (o0[0] != o1[0]) ? 0 : (o0[1] != o1[1]) ? 1 : 2;
          const int bi = i + std::min(o0[0], o1[0]);
          const int bj = j + std::min(o0[1], o1[1]);
          const int bk = k + std::min(o0[2], o1[2]);
          everts[e] = vertex_on_edge(bi, bj, bk, axis);
        }

        const std::int8_t* tris = mc::tri_table[cube];
        for (int t = 0; tris[t] != -1; t += 3) {
          mesh.triangles.push_back({everts[tris[t]], everts[tris[t + 1]],
                                    everts[tris[t + 2]]});
        }
      }
    }
  }

  mesh.drop_degenerate();
  return mesh;
}

BinaryGrid occupancy(const SdfGrid& grid) {
  BinaryGrid occ;
  occ.resolution = grid.spec.resolution;
  occ.values.resize(grid.values.size());
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    occ.values[i] = grid.values[i] <= 0.0f ? 1 : 0;
  }
  return occ;
}

PointCloud sample_surface_points(const TriangleMesh& mesh, std::size_t n,
                                 std::uint64_t seed) {
  if (mesh.empty()) throw ParameterError("cannot sample an empty mesh");
  if (n < 1) throw ParameterError("sample count must be >= 1");
  mesh.check_indices();

  std::vector<double> cumulative(mesh.triangles.size());
  double total = 0.0;
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    total += mesh.triangle_area(t);
    cumulative[t] = total;
  }
  if (!(total > 0.0)) throw ParameterError("mesh has zero surface area");

  Rng rng(seed);
  PointCloud points;
  points.reserve(n);
  for (std::size_t s = 0; s < n; ++s) {
    const double pick = rng.uniform() * total;
    const auto it =
        std::lower_bound(cumulative.begin(), cumulative.end(), pick);
    const std::size_t t = std::min(
        static_cast<std::size_t>(it - cumulative.begin()),
        mesh.triangles.size() - 1);
    const auto& tri = mesh.triangles[t];
    const Vec3& a = mesh.vertices[tri[0]];
    const Vec3& b = mesh.vertices[tri[1]];
    const Vec3& c = mesh.vertices[tri[2]];
    const double r1 = std::sqrt(rng.uniform());
    const double r2 = rng.uniform();
    const double wa = 1.0 - r1;
    const double wb = r1 * (1.0 - r2);
    const double wc = r1 * r2;
    points.push_back({wa * a[0] + wb * b[0] + wc * c[0],
                      wa * a[1] + wb * b[1] + wc * c[1],
                      wa * a[2] + wb * b[2] + wc * c[2]});
  }
  return points;
}

BinaryGrid downsample_occupancy(const BinaryGrid& occ, int out_side) {
  if (out_side < 1 || occ.resolution % out_side != 0) {
    throw ParameterError("occupancy side must be a multiple of the target");
  }
  const int f = occ.resolution / out_side;
  BinaryGrid out;
  out.resolution = out_side;
  out.values.assign(static_cast<std::size_t>(out_side) * out_side * out_side,
                    0);
  for (int k = 0; k < occ.resolution; ++k) {
    for (int j = 0; j < occ.resolution; ++j) {
      for (int i = 0; i < occ.resolution; ++i) {
        if (occ.at(i, j, k)) {
          out.values[out.index(i / f, j / f, k / f)] = 1;
        }
      }
    }
  }
  return out;
}

}  // namespace wala
