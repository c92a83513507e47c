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

#include "wala/grid.hpp"

#include <cmath>
#include <string>

namespace wala {

void GridSpec::validate(int levels) const {
  if (resolution < 8) {
    throw ParameterError("grid resolution must be >= 8, got " +
                         std::to_string(resolution));
  }
  const int divisor = 1 << levels;
  if (resolution % divisor != 0) {
    throw ParameterError("grid resolution " + std::to_string(resolution) +
                         " must be a multiple of " + std::to_string(divisor));
  }
  if (!(spacing > 0.0)) throw ParameterError("grid spacing must be positive");
  if (!(truncation >= spacing)) {
    throw ParameterError("truncation must be >= spacing");
  }
}

GridSpec GridSpec::centered(int n, double half_extent) {
  GridSpec spec;
  spec.resolution = n;
  spec.spacing = 2.0 * half_extent / n;
  spec.origin = {-half_extent + 0.5 * spec.spacing,
                 -half_extent + 0.5 * spec.spacing,
                 -half_extent + 0.5 * spec.spacing};
  spec.truncation = 3.0 * spec.spacing;
  return spec;
}

SdfGrid::SdfGrid(GridSpec s, std::vector<float> v)
    : spec(s), values(std::move(v)) {
  if (values.size() != spec.voxel_count()) {
    throw ParameterError("SDF value count does not match resolution");
  }
  clamp_and_check();
}

void SdfGrid::clamp_and_check() {
  const float tau = static_cast<float>(spec.truncation);
  for (float& v : values) {
    if (!std::isfinite(v)) throw DataError("SDF contains non-finite values");
    if (v > tau) v = tau;
    if (v < -tau) v = -tau;
  }
}

std::size_t BinaryGrid::count() const {
  std::size_t c = 0;
  for (auto v : values) c += (v != 0);
  return c;
}

}  // namespace wala
