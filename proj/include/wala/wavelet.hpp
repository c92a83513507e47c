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

enum class WaveletFamily { Haar, Cdf97 };
enum class BoundaryMode { Periodic, Symmetric };

// Filter metadata for one analysis/synthesis pair. The transforms themselves
// run as lifting steps; the tap lists here describe the equivalent filters
// (DC gain sqrt(2) on the lowpass branch).
struct WaveletFilterPair {
  WaveletFamily family = WaveletFamily::Haar;
  BoundaryMode boundary = BoundaryMode::Periodic;
  std::vector<double> analysis_lo;
  std::vector<double> analysis_hi;
  std::vector<double> synthesis_lo;
  std::vector<double> synthesis_hi;

  static WaveletFilterPair haar(BoundaryMode b = BoundaryMode::Periodic);
  static WaveletFilterPair cdf97(BoundaryMode b = BoundaryMode::Symmetric);
  static WaveletFilterPair make(WaveletFamily f, BoundaryMode b);
};

// Dense cube of coefficients, x-fastest.
struct Cube {
  int side = 0;
  std::vector<double> v;

  Cube() = default;
  explicit Cube(int s)
      : side(s), v(static_cast<std::size_t>(s) * s * s, 0.0) {}

  std::size_t index(int x, int y, int z) const {
    const std::size_t n = static_cast<std::size_t>(side);
    return static_cast<std::size_t>(x) +
           n * (static_cast<std::size_t>(y) + n * static_cast<std::size_t>(z));
  }
  double at(int x, int y, int z) const { return v[index(x, y, z)]; }
  double& at(int x, int y, int z) { return v[index(x, y, z)]; }
};

// One detail level: the 7 orientation subbands. Subband s in 1..7 encodes
// highpass flags (bx, by, bz) with s = bx + 2*by + 4*bz; bands[s-1].
struct DecompLevel {
  int side = 0;
  std::array<Cube, 7> bands;
};

// Multilevel separable 3-D decomposition. levels[0] is the coarsest detail
// level (the spec's D0); levels.back() is the finest.
struct WaveletDecomposition {
  GridSpec spec;
  WaveletFamily family = WaveletFamily::Haar;
  BoundaryMode boundary = BoundaryMode::Periodic;
  Cube c0;
  std::vector<DecompLevel> levels;

  int level_count() const { return static_cast<int>(levels.size()); }
};

// Packed 64-channel grid over the coarse lattice: channel 0 holds C0,
// channels 1..7 the D0 subbands, channels 8..63 the D1 subbands arranged as
// 2x2x2 child blocks per D0 cell (child = 4*dz + 2*dy + dx, subband-major).
// Channels are stored channel-major, x-fastest within a channel.
struct DiffusibleTree {
  static constexpr int kChannels = 64;

  int side = 0;  // M
  std::vector<double> data;
  GridSpec spec;
  WaveletFamily family = WaveletFamily::Haar;
  BoundaryMode boundary = BoundaryMode::Periodic;

  std::size_t cells() const {
    return static_cast<std::size_t>(side) * side * side;
  }
  double at(int channel, int x, int y, int z) const {
    return data[static_cast<std::size_t>(channel) * cells() +
                static_cast<std::size_t>(x) +
                static_cast<std::size_t>(side) *
                    (static_cast<std::size_t>(y) +
                     static_cast<std::size_t>(side) * z)];
  }
  double& at(int channel, int x, int y, int z) {
    return data[static_cast<std::size_t>(channel) * cells() +
                static_cast<std::size_t>(x) +
                static_cast<std::size_t>(side) *
                    (static_cast<std::size_t>(y) +
                     static_cast<std::size_t>(side) * z)];
  }
};

// Per-subband significant coordinates: a coordinate is in P0 when its
// magnitude is at least rho times the subband maximum (all-zero subbands get
// an empty P0). Levels 0 and 1 (D0, D1) participate.
struct ImportanceSet {
  double rho = 0.0;
  std::array<int, 2> level_sides = {0, 0};
  std::array<std::array<std::vector<std::uint32_t>, 7>, 2> p0;

  std::size_t p0_count(int level) const {
    std::size_t n = 0;
    for (const auto& band : p0[static_cast<std::size_t>(level)]) {
      n += band.size();
    }
    return n;
  }
};

// Side length after one analysis level.
int side_after_level(int side, WaveletFamily family, BoundaryMode boundary);

// Sides after each of `levels` analysis steps (last entry = coarse side).
std::vector<int> analysis_sides(int n, int levels, WaveletFamily family,
                                BoundaryMode boundary);

WaveletDecomposition dwt3(const SdfGrid& grid, const WaveletFilterPair& filters,
                          int levels = 3);

SdfGrid idwt3(const WaveletDecomposition& decomp,
              const WaveletFilterPair& filters);

DiffusibleTree pack_tree(const WaveletDecomposition& decomp);

WaveletDecomposition unpack_tree(const DiffusibleTree& tree);

ImportanceSet importance_set(const WaveletDecomposition& decomp, double rho);

// Zeroes D0 outside P0 and the D1 children of dropped D0 parents; C0 (and
// any finer levels) pass through untouched.
WaveletDecomposition subband_filter(const WaveletDecomposition& decomp,
                                    const ImportanceSet& keep);

// Exact lattice quarter-turn of a Haar decomposition (coefficient
// permutations and sign flips; no resynthesis). Throws ParameterError for
// other families, whose boundary extension is not rotation-equivariant.
WaveletDecomposition rotate_decomposition(const WaveletDecomposition& decomp,
                                          int axis, int quarter_turns);

// Quarter-turn lattice rotation of a cube: out(i,j,k) = in(j, L-1-i, k) for
// one turn about z, and cyclically for x/y.
Cube rotate_cube(const Cube& in, int axis, int quarter_turns);

}  // namespace wala
