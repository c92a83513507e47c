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
#include <cstddef>
#include <vector>

#include "wala/common.hpp"

namespace wala {

using Vec3 = std::array<double, 3>;

// Placement of a cubic voxel lattice in world space. Voxel (i,j,k) is centred
// at origin + spacing * (i,j,k). Values are stored x-fastest.
struct GridSpec {
  int resolution = 0;     // N; the grid is N^3
  Vec3 origin = {0, 0, 0};
  double spacing = 0.0;   // world units per voxel
  double truncation = 0.0;  // tau, the TSDF clamp band

  void validate(int levels = 3) const;

  std::size_t voxel_count() const {
    const std::size_t n = static_cast<std::size_t>(resolution);
    return n * n * n;
  }

  std::size_t index(int i, int j, int k) const {
    const std::size_t n = static_cast<std::size_t>(resolution);
    return static_cast<std::size_t>(i) +
           n * (static_cast<std::size_t>(j) + n * static_cast<std::size_t>(k));
  }

  Vec3 position(int i, int j, int k) const {
    return {origin[0] + spacing * i, origin[1] + spacing * j,
            origin[2] + spacing * k};
  }

  // Spec for a grid of side n covering the cube [-half, half]^3 with a
  // truncation band of 3 voxels (voxel centres inset by half a spacing).
  static GridSpec centered(int n, double half_extent);
};

// Truncated signed distance volume. Negative inside, positive outside,
// every value clamped to [-tau, tau] and finite.
struct SdfGrid {
  GridSpec spec;
  std::vector<float> values;  // N^3, x-fastest

  SdfGrid() = default;
  SdfGrid(GridSpec s, std::vector<float> v);

  float at(int i, int j, int k) const { return values[spec.index(i, j, k)]; }
  float& at(int i, int j, int k) { return values[spec.index(i, j, k)]; }

  // Clamps all values to +-tau and rejects non-finite entries.
  void clamp_and_check();
};

struct BinaryGrid {
  int resolution = 0;
  std::vector<std::uint8_t> values;  // N^3, x-fastest, 0/1

  std::size_t index(int i, int j, int k) const {
    const std::size_t n = static_cast<std::size_t>(resolution);
    return static_cast<std::size_t>(i) +
           n * (static_cast<std::size_t>(j) + n * static_cast<std::size_t>(k));
  }

  bool at(int i, int j, int k) const { return values[index(i, j, k)] != 0; }

  std::size_t count() const;
};

}  // namespace wala
