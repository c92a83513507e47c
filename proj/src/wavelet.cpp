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

#include "wala/wavelet.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wala {

namespace {

constexpr double kInvSqrt2 = 0.70710678118654752440;

// CDF 9/7 lifting constants; the scale step gives the lowpass branch a DC
// gain of sqrt(2), matching orthonormal Haar.
constexpr double kAlpha = -1.586134342059924;
constexpr double kBeta = -0.052980118572961;
constexpr double kGamma = 0.882911075530934;
constexpr double kDelta = 0.443506852043971;
constexpr double kScaleS = 1.149604398860497;

// Symmetric pre-extension width per side. (L+16)/2 coefficients per band is
// what reproduces the 256 -> 136 -> 76 -> 46 size chain of the reference
// configuration.
constexpr int kSymPad = 8;

int reflect_index(int idx, int len) {
  // Whole-sample symmetry with period 2*len-2.
  while (idx < 0 || idx >= len) {
    if (idx < 0) idx = -idx;
    if (idx >= len) idx = 2 * len - 2 - idx;
  }
  return idx;
}

// Periodic-core analysis of an even-length line into lo/hi halves.
void analyze_line(const double* x, int len, WaveletFamily family, double* lo,
                  double* hi) {
  const int h = len / 2;
  if (family == WaveletFamily::Haar) {
    for (int i = 0; i < h; ++i) {
      const double a = x[2 * i];
      const double b = x[2 * i + 1];
      lo[i] = (a + b) * kInvSqrt2;
      hi[i] = (b - a) * kInvSqrt2;
    }
    return;
  }
  for (int i = 0; i < h; ++i) {
    lo[i] = x[2 * i];
    hi[i] = x[2 * i + 1];
  }
  for (int i = 0; i < h; ++i) hi[i] += kAlpha * (lo[i] + lo[(i + 1) % h]);
  for (int i = 0; i < h; ++i) lo[i] += kBeta * (hi[(i + h - 1) % h] + hi[i]);
  for (int i = 0; i < h; ++i) hi[i] += kGamma * (lo[i] + lo[(i + 1) % h]);
  for (int i = 0; i < h; ++i) lo[i] += kDelta * (hi[(i + h - 1) % h] + hi[i]);
  for (int i = 0; i < h; ++i) {
    lo[i] *= kScaleS;
    hi[i] /= kScaleS;
  }
}

void synthesize_line(const double* lo_in, const double* hi_in, int h,
                     WaveletFamily family, double* x) {
  if (family == WaveletFamily::Haar) {
    for (int i = 0; i < h; ++i) {
      x[2 * i] = (lo_in[i] - hi_in[i]) * kInvSqrt2;
      x[2 * i + 1] = (lo_in[i] + hi_in[i]) * kInvSqrt2;
    }
    return;
  }
  std::vector<double> lo(lo_in, lo_in + h);
  std::vector<double> hi(hi_in, hi_in + h);
  for (int i = 0; i < h; ++i) {
    lo[i] /= kScaleS;
    hi[i] *= kScaleS;
  }
  for (int i = 0; i < h; ++i) lo[i] -= kDelta * (hi[(i + h - 1) % h] + hi[i]);
  for (int i = 0; i < h; ++i) hi[i] -= kGamma * (lo[i] + lo[(i + 1) % h]);
  for (int i = 0; i < h; ++i) lo[i] -= kBeta * (hi[(i + h - 1) % h] + hi[i]);
  for (int i = 0; i < h; ++i) hi[i] -= kAlpha * (lo[i] + lo[(i + 1) % h]);
  for (int i = 0; i < h; ++i) {
    x[2 * i] = lo[i];
    x[2 * i + 1] = hi[i];
  }
}

bool expands(WaveletFamily family, BoundaryMode boundary) {
  return family == WaveletFamily::Cdf97 && boundary == BoundaryMode::Symmetric;
}

struct Tensor3 {
  int d[3] = {0, 0, 0};
  std::vector<double> v;

  Tensor3() = default;
  Tensor3(int dx, int dy, int dz)
      : d{dx, dy, dz},
        v(static_cast<std::size_t>(dx) * dy * dz, 0.0) {}

  std::size_t index(int x, int y, int z) const {
    return static_cast<std::size_t>(x) +
           static_cast<std::size_t>(d[0]) *
               (static_cast<std::size_t>(y) +
                static_cast<std::size_t>(d[1]) * static_cast<std::size_t>(z));
  }
};

// One analysis pass along `axis`; the axis extent L becomes 2h with the low
// band in [0,h) and the high band in [h,2h).
Tensor3 axis_analysis(const Tensor3& t, int axis, WaveletFamily family,
                      BoundaryMode boundary) {
  const int len = t.d[axis];
  if (len % 2 != 0 || len < 4) {
    throw ParameterError("axis extent " + std::to_string(len) +
                         " not transformable (must be even and >= 4)");
  }
  const bool pad = expands(family, boundary);
  const int ext = pad ? len + 2 * kSymPad : len;
  const int h = ext / 2;

  int out_dims[3] = {t.d[0], t.d[1], t.d[2]};
  out_dims[axis] = 2 * h;
  Tensor3 out(out_dims[0], out_dims[1], out_dims[2]);

  const int u = (axis + 1) % 3;
  const int w = (axis + 2) % 3;
  const std::size_t n_lines =
      static_cast<std::size_t>(t.d[u]) * static_cast<std::size_t>(t.d[w]);

  parallel_chunks(n_lines, 64, [&](std::size_t l0, std::size_t l1) {
    std::vector<double> line(static_cast<std::size_t>(ext));
    std::vector<double> lo(static_cast<std::size_t>(h));
    std::vector<double> hi(static_cast<std::size_t>(h));
    for (std::size_t l = l0; l < l1; ++l) {
      const int iu = static_cast<int>(l % static_cast<std::size_t>(t.d[u]));
      const int iw = static_cast<int>(l / static_cast<std::size_t>(t.d[u]));
      int at[3];
      at[u] = iu;
      at[w] = iw;
      for (int i = 0; i < ext; ++i) {
        at[axis] = pad ? reflect_index(i - kSymPad, len) : i;
        line[static_cast<std::size_t>(i)] = t.v[t.index(at[0], at[1], at[2])];
      }
      analyze_line(line.data(), ext, family, lo.data(), hi.data());
      for (int i = 0; i < h; ++i) {
        at[axis] = i;
        out.v[out.index(at[0], at[1], at[2])] = lo[static_cast<std::size_t>(i)];
        at[axis] = h + i;
        out.v[out.index(at[0], at[1], at[2])] = hi[static_cast<std::size_t>(i)];
      }
    }
  });
  return out;
}

Tensor3 axis_synthesis(const Tensor3& t, int axis, WaveletFamily family,
                       BoundaryMode boundary) {
  const int h = t.d[axis] / 2;
  const bool pad = expands(family, boundary);
  const int ext = 2 * h;
  const int out_len = pad ? ext - 2 * kSymPad : ext;
  if (out_len < 2) throw ParameterError("band too small to invert");

  int out_dims[3] = {t.d[0], t.d[1], t.d[2]};
  out_dims[axis] = out_len;
  Tensor3 out(out_dims[0], out_dims[1], out_dims[2]);

  const int u = (axis + 1) % 3;
  const int w = (axis + 2) % 3;
  const std::size_t n_lines =
      static_cast<std::size_t>(t.d[u]) * static_cast<std::size_t>(t.d[w]);

  parallel_chunks(n_lines, 64, [&](std::size_t l0, std::size_t l1) {
    std::vector<double> lo(static_cast<std::size_t>(h));
    std::vector<double> hi(static_cast<std::size_t>(h));
    std::vector<double> line(static_cast<std::size_t>(ext));
    for (std::size_t l = l0; l < l1; ++l) {
      const int iu = static_cast<int>(l % static_cast<std::size_t>(t.d[u]));
      const int iw = static_cast<int>(l / static_cast<std::size_t>(t.d[u]));
      int at[3];
      at[u] = iu;
      at[w] = iw;
      for (int i = 0; i < h; ++i) {
        at[axis] = i;
        lo[static_cast<std::size_t>(i)] = t.v[t.index(at[0], at[1], at[2])];
        at[axis] = h + i;
        hi[static_cast<std::size_t>(i)] = t.v[t.index(at[0], at[1], at[2])];
      }
      synthesize_line(lo.data(), hi.data(), h, family, line.data());
      for (int i = 0; i < out_len; ++i) {
        at[axis] = i;
        out.v[out.index(at[0], at[1], at[2])] =
            line[static_cast<std::size_t>(pad ? i + kSymPad : i)];
      }
    }
  });
  return out;
}

void check_filters_match(const WaveletDecomposition& d,
                         const WaveletFilterPair& f) {
  if (d.family != f.family || d.boundary != f.boundary) {
    throw ParameterError(
        "decomposition was produced with a different filter configuration");
  }
}

}  // namespace

WaveletFilterPair WaveletFilterPair::haar(BoundaryMode b) {
  WaveletFilterPair f;
  f.family = WaveletFamily::Haar;
  f.boundary = b;
  f.analysis_lo = {kInvSqrt2, kInvSqrt2};
  f.analysis_hi = {-kInvSqrt2, kInvSqrt2};
  f.synthesis_lo = {kInvSqrt2, kInvSqrt2};
  f.synthesis_hi = {-kInvSqrt2, kInvSqrt2};
  return f;
}

WaveletFilterPair WaveletFilterPair::cdf97(BoundaryMode b) {
  WaveletFilterPair f;
  f.family = WaveletFamily::Cdf97;
  f.boundary = b;
  const double rt2 = std::sqrt(2.0);
  // JPEG2000 irreversible 9/7 taps rescaled to the implementation's gains
  // (lowpass DC gain sqrt(2) on analysis and synthesis).
  const double alo[9] = {0.026748757410810898, -0.016864118442875010,
                         -0.078223266528990478, 0.266864118442875050,
                         0.602949018236360150, 0.266864118442875050,
                         -0.078223266528990478, -0.016864118442875010,
                         0.026748757410810898};
  const double ahi[7] = {0.091271763114249930, -0.057543526228500862,
                         -0.591271763114249930, 1.115087052456994000,
                         -0.591271763114249930, -0.057543526228500862,
                         0.091271763114249930};
  const double slo[7] = {-0.091271763114249930, -0.057543526228500862,
                         0.591271763114249930, 1.115087052456994000,
                         0.591271763114249930, -0.057543526228500862,
                         -0.091271763114249930};
  const double shi[9] = {0.026748757410810898, 0.016864118442875010,
                         -0.078223266528990478, -0.266864118442875050,
                         0.602949018236360150, -0.266864118442875050,
                         -0.078223266528990478, 0.016864118442875010,
                         0.026748757410810898};
  for (double c : alo) f.analysis_lo.push_back(c * rt2);
  for (double c : ahi) f.analysis_hi.push_back(c / rt2);
  for (double c : slo) f.synthesis_lo.push_back(c / rt2);
  for (double c : shi) f.synthesis_hi.push_back(c * rt2);
  return f;
}

WaveletFilterPair WaveletFilterPair::make(WaveletFamily fam, BoundaryMode b) {
  return fam == WaveletFamily::Haar ? haar(b) : cdf97(b);
}

int side_after_level(int side, WaveletFamily family, BoundaryMode boundary) {
  if (side % 2 != 0) {
    throw ParameterError("side " + std::to_string(side) +
                         " is odd; cannot apply another level");
  }
  return expands(family, boundary) ? side / 2 + kSymPad : side / 2;
}

std::vector<int> analysis_sides(int n, int levels, WaveletFamily family,
                                BoundaryMode boundary) {
  std::vector<int> sides;
  int cur = n;
  for (int l = 0; l < levels; ++l) {
    cur = side_after_level(cur, family, boundary);
    sides.push_back(cur);
  }
  return sides;
}

WaveletDecomposition dwt3(const SdfGrid& grid, const WaveletFilterPair& filters,
                          int levels) {
  if (levels < 1) throw ParameterError("levels must be >= 1");
  const int n = grid.spec.resolution;
  analysis_sides(n, levels, filters.family, filters.boundary);  // validates

  WaveletDecomposition decomp;
  decomp.spec = grid.spec;
  decomp.family = filters.family;
  decomp.boundary = filters.boundary;
  decomp.levels.resize(static_cast<std::size_t>(levels));

  Tensor3 approx(n, n, n);
  for (std::size_t i = 0; i < grid.values.size(); ++i) {
    approx.v[i] = static_cast<double>(grid.values[i]);
  }

  for (int pass = 0; pass < levels; ++pass) {
    Tensor3 t = axis_analysis(approx, 0, filters.family, filters.boundary);
    t = axis_analysis(t, 1, filters.family, filters.boundary);
    t = axis_analysis(t, 2, filters.family, filters.boundary);
    const int h = t.d[0] / 2;

    DecompLevel& level = decomp.levels[static_cast<std::size_t>(levels - 1 - pass)];
    level.side = h;
    Tensor3 next(h, h, h);
    for (int s = 0; s < 8; ++s) {
      const int bx = s & 1, by = (s >> 1) & 1, bz = (s >> 2) & 1;
      Cube* dst = nullptr;
      if (s == 0) {
        dst = nullptr;  // approx handled below
      } else {
        level.bands[static_cast<std::size_t>(s - 1)] = Cube(h);
        dst = &level.bands[static_cast<std::size_t>(s - 1)];
      }
      for (int z = 0; z < h; ++z) {
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < h; ++x) {
            const double val =
                t.v[t.index(bx * h + x, by * h + y, bz * h + z)];
            if (s == 0) {
              next.v[next.index(x, y, z)] = val;
            } else {
              dst->at(x, y, z) = val;
            }
          }
        }
      }
    }
    approx = std::move(next);
  }

  decomp.c0 = Cube(approx.d[0]);
  decomp.c0.v = std::move(approx.v);
  return decomp;
}

SdfGrid idwt3(const WaveletDecomposition& decomp,
              const WaveletFilterPair& filters) {
  check_filters_match(decomp, filters);
  if (decomp.levels.empty()) throw ParameterError("empty decomposition");
  if (decomp.c0.side != decomp.levels.front().side) {
    throw ParameterError("coarse side does not match level 0 detail side");
  }

  Tensor3 approx(decomp.c0.side, decomp.c0.side, decomp.c0.side);
  approx.v = decomp.c0.v;

  for (const DecompLevel& level : decomp.levels) {
    const int h = level.side;
    if (approx.d[0] != h) {
      throw ParameterError("detail level side does not match approximation");
    }
    for (const Cube& band : level.bands) {
      if (band.side != h) {
        throw ParameterError("subband side mismatch within a level");
      }
    }
    Tensor3 assembled(2 * h, 2 * h, 2 * h);
    for (int s = 0; s < 8; ++s) {
      const int bx = s & 1, by = (s >> 1) & 1, bz = (s >> 2) & 1;
      for (int z = 0; z < h; ++z) {
        for (int y = 0; y < h; ++y) {
          for (int x = 0; x < h; ++x) {
            const double val =
                s == 0 ? approx.v[approx.index(x, y, z)]
                       : level.bands[static_cast<std::size_t>(s - 1)].at(x, y, z);
            assembled.v[assembled.index(bx * h + x, by * h + y, bz * h + z)] =
                val;
          }
        }
      }
    }
    Tensor3 out = axis_synthesis(assembled, 2, filters.family, filters.boundary);
    out = axis_synthesis(out, 1, filters.family, filters.boundary);
    out = axis_synthesis(out, 0, filters.family, filters.boundary);
    approx = std::move(out);
  }

  if (approx.d[0] != decomp.spec.resolution) {
    throw ParameterError("reconstruction does not match the stored grid spec");
  }
  const double tau = decomp.spec.truncation;
  std::vector<float> values(approx.v.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    values[i] = static_cast<float>(std::clamp(approx.v[i], -tau, tau));
  }
  return SdfGrid(decomp.spec, std::move(values));
}

DiffusibleTree pack_tree(const WaveletDecomposition& decomp) {
  if (decomp.level_count() < 3) {
    throw ParameterError("packing requires a 3-level decomposition");
  }
  if (decomp.level_count() > 3) {
    throw ParameterError("packed trees are defined for exactly 3 levels");
  }
  const int m = decomp.c0.side;
  const int s1 = decomp.levels[1].side;

  DiffusibleTree tree;
  tree.side = m;
  tree.spec = decomp.spec;
  tree.family = decomp.family;
  tree.boundary = decomp.boundary;
  tree.data.assign(static_cast<std::size_t>(DiffusibleTree::kChannels) *
                       tree.cells(),
                   0.0);

  for (int z = 0; z < m; ++z) {
    for (int y = 0; y < m; ++y) {
      for (int x = 0; x < m; ++x) {
        tree.at(0, x, y, z) = decomp.c0.at(x, y, z);
        for (int s = 1; s <= 7; ++s) {
          tree.at(s, x, y, z) =
              decomp.levels[0].bands[static_cast<std::size_t>(s - 1)].at(x, y,
                                                                         z);
        }
        for (int s = 1; s <= 7; ++s) {
          const Cube& band =
              decomp.levels[1].bands[static_cast<std::size_t>(s - 1)];
          for (int child = 0; child < 8; ++child) {
            const int dx = child & 1, dy = (child >> 1) & 1,
                      dz = (child >> 2) & 1;
            const int cx = 2 * x + dx, cy = 2 * y + dy, cz = 2 * z + dz;
            double val = 0.0;
            if (cx < s1 && cy < s1 && cz < s1) val = band.at(cx, cy, cz);
            tree.at(8 + (s - 1) * 8 + child, x, y, z) = val;
          }
        }
      }
    }
  }
  return tree;
}

namespace {

int side_before_level(int side, WaveletFamily family, BoundaryMode boundary) {
  return expands(family, boundary) ? 2 * side - 2 * kSymPad : 2 * side;
}

}  // namespace

WaveletDecomposition unpack_tree(const DiffusibleTree& tree) {
  if (tree.side < 1 ||
      tree.data.size() !=
          static_cast<std::size_t>(DiffusibleTree::kChannels) * tree.cells()) {
    throw ParameterError("tree must carry exactly 64 channels");
  }
  const int m = tree.side;
  const int s1 = side_before_level(m, tree.family, tree.boundary);
  const int s2 = side_before_level(s1, tree.family, tree.boundary);

  WaveletDecomposition decomp;
  decomp.spec = tree.spec;
  decomp.family = tree.family;
  decomp.boundary = tree.boundary;
  decomp.c0 = Cube(m);
  decomp.levels.resize(3);
  decomp.levels[0].side = m;
  decomp.levels[1].side = s1;
  decomp.levels[2].side = s2;
  for (int s = 0; s < 7; ++s) {
    decomp.levels[0].bands[static_cast<std::size_t>(s)] = Cube(m);
    decomp.levels[1].bands[static_cast<std::size_t>(s)] = Cube(s1);
    decomp.levels[2].bands[static_cast<std::size_t>(s)] = Cube(s2);
  }

  for (int z = 0; z < m; ++z) {
    for (int y = 0; y < m; ++y) {
      for (int x = 0; x < m; ++x) {
        decomp.c0.at(x, y, z) = tree.at(0, x, y, z);
        for (int s = 1; s <= 7; ++s) {
          decomp.levels[0].bands[static_cast<std::size_t>(s - 1)].at(x, y, z) =
              tree.at(s, x, y, z);
        }
        for (int s = 1; s <= 7; ++s) {
          Cube& band = decomp.levels[1].bands[static_cast<std::size_t>(s - 1)];
          for (int child = 0; child < 8; ++child) {
            const int dx = child & 1, dy = (child >> 1) & 1,
                      dz = (child >> 2) & 1;
            const int cx = 2 * x + dx, cy = 2 * y + dy, cz = 2 * z + dz;
            if (cx < s1 && cy < s1 && cz < s1) {
              band.at(cx, cy, cz) = tree.at(8 + (s - 1) * 8 + child, x, y, z);
            }
          }
        }
      }
    }
  }
  return decomp;
}

ImportanceSet importance_set(const WaveletDecomposition& decomp, double rho) {
  if (!(rho > 0.0 && rho < 1.0)) {
    throw ParameterError("importance threshold must lie in (0,1)");
  }
  if (decomp.level_count() < 2) {
    throw ParameterError("importance sets need levels D0 and D1");
  }
  ImportanceSet set;
  set.rho = rho;
  for (int level = 0; level < 2; ++level) {
    const DecompLevel& dl = decomp.levels[static_cast<std::size_t>(level)];
    set.level_sides[static_cast<std::size_t>(level)] = dl.side;
    for (int s = 0; s < 7; ++s) {
      const Cube& band = dl.bands[static_cast<std::size_t>(s)];
      double max_abs = 0.0;
      for (double c : band.v) max_abs = std::max(max_abs, std::abs(c));
      auto& coords = set.p0[static_cast<std::size_t>(level)]
                           [static_cast<std::size_t>(s)];
      if (max_abs == 0.0) continue;
      const double threshold = rho * max_abs;
      for (std::size_t i = 0; i < band.v.size(); ++i) {
        if (std::abs(band.v[i]) >= threshold) {
          coords.push_back(static_cast<std::uint32_t>(i));
        }
      }
    }
  }
  return set;
}

WaveletDecomposition subband_filter(const WaveletDecomposition& decomp,
                                    const ImportanceSet& keep) {
  if (decomp.level_count() < 2 ||
      keep.level_sides[0] != decomp.levels[0].side ||
      keep.level_sides[1] != decomp.levels[1].side) {
    throw ParameterError("importance set shape does not match decomposition");
  }
  WaveletDecomposition out = decomp;

  const int m = decomp.levels[0].side;
  const int s1 = decomp.levels[1].side;
  for (int s = 0; s < 7; ++s) {
    // Keep mask over D0 coordinates of this subband.
    std::vector<std::uint8_t> kept(decomp.levels[0].bands[0].v.size(), 0);
    for (std::uint32_t idx : keep.p0[0][static_cast<std::size_t>(s)]) {
      kept[idx] = 1;
    }
    Cube& d0 = out.levels[0].bands[static_cast<std::size_t>(s)];
    for (std::size_t i = 0; i < d0.v.size(); ++i) {
      if (!kept[i]) d0.v[i] = 0.0;
    }
    // D1 children inherit their parent's fate.
    Cube& d1 = out.levels[1].bands[static_cast<std::size_t>(s)];
    for (int z = 0; z < s1; ++z) {
      for (int y = 0; y < s1; ++y) {
        for (int x = 0; x < s1; ++x) {
          const int px = x >> 1, py = y >> 1, pz = z >> 1;
          if (px >= m || py >= m || pz >= m ||
              !kept[static_cast<std::size_t>(px) +
                    static_cast<std::size_t>(m) *
                        (static_cast<std::size_t>(py) +
                         static_cast<std::size_t>(m) * pz)]) {
            d1.at(x, y, z) = 0.0;
          }
        }
      }
    }
  }
  return out;
}

Cube rotate_cube(const Cube& in, int axis, int quarter_turns) {
  if (axis < 0 || axis > 2) throw ParameterError("axis must be 0, 1 or 2");
  quarter_turns = ((quarter_turns % 4) + 4) % 4;
  Cube cur = in;
  const int n = in.side;
  for (int t = 0; t < quarter_turns; ++t) {
    Cube next(n);
    for (int z = 0; z < n; ++z) {
      for (int y = 0; y < n; ++y) {
        for (int x = 0; x < n; ++x) {
          double val;
          if (axis == 2) {
            val = cur.at(y, n - 1 - x, z);
          } else if (axis == 0) {
            val = cur.at(x, z, n - 1 - y);
          } else {
            val = cur.at(n - 1 - z, y, x);
          }
          next.at(x, y, z) = val;
        }
      }
    }
    cur = std::move(next);
  }
  return cur;
}

WaveletDecomposition rotate_decomposition(const WaveletDecomposition& decomp,
                                          int axis, int quarter_turns) {
  if (decomp.family != WaveletFamily::Haar) {
    throw ParameterError(
        "exact coefficient rotation requires the haar family; rotate the SDF "
        "grid and re-transform for other filters");
  }
  if (axis < 0 || axis > 2) throw ParameterError("axis must be 0, 1 or 2");
  quarter_turns = ((quarter_turns % 4) + 4) % 4;

  WaveletDecomposition cur = decomp;
  for (int t = 0; t < quarter_turns; ++t) {
    WaveletDecomposition next = cur;
    next.c0 = rotate_cube(cur.c0, axis, 1);
    for (std::size_t lvl = 0; lvl < cur.levels.size(); ++lvl) {
      for (int s_out = 1; s_out <= 7; ++s_out) {
        const int bx = s_out & 1, by = (s_out >> 1) & 1, bz = (s_out >> 2) & 1;
        // Input subband whose axes map onto the output axes under one turn,
        // and the input axis that gets index-reversed (its highpass bands
        // pick up a sign flip).
        int ibx, iby, ibz, rev_flag;
        if (axis == 2) {  // out x <- in y (rev), out y <- in x
          ibx = by;
          iby = bx;
          ibz = bz;
          rev_flag = iby;
        } else if (axis == 0) {  // out y <- in z (rev), out z <- in y
          ibx = bx;
          iby = bz;
          ibz = by;
          rev_flag = ibz;
        } else {  // axis == 1: out x <- in z, out z <- in x (rev)
          ibx = bz;
          iby = by;
          ibz = bx;
          rev_flag = ibx;
        }
        const int s_in = ibx + 2 * iby + 4 * ibz;
        Cube rotated = rotate_cube(
            cur.levels[lvl].bands[static_cast<std::size_t>(s_in - 1)], axis, 1);
        if (rev_flag) {
          for (double& c : rotated.v) c = -c;
        }
        next.levels[lvl].bands[static_cast<std::size_t>(s_out - 1)] =
            std::move(rotated);
      }
    }
    cur = std::move(next);
  }
  return cur;
}

}  // namespace wala
