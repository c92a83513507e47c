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

#include "wala/grid.hpp"
#include "wala/mesh.hpp"
#include "wala/shapes.hpp"

namespace wala {

// Evaluates the analytic signed distance of `shape` at every voxel centre and
// clamps to +-tau. Negative inside.
SdfGrid sdf_from_shape(const ShapeSpec& shape, const GridSpec& spec);

// TSDF of a watertight mesh: exact point-triangle distance inside the tau
// band, sign by ray-crossing parity with a 3-axis majority vote. Throws
// GeometryError when the axis votes disagree on more than 0.1% of voxels
// (non-watertight input) and ParameterError on an empty mesh.
SdfGrid voxelize_mesh(const TriangleMesh& mesh, const GridSpec& spec);

// Standard 256-case marching cubes at `iso`, vertices on cell edges by linear
// interpolation and welded across cells. Values equal to iso count as inside.
// Throws DataError when the grid never crosses iso.
TriangleMesh marching_cubes(const SdfGrid& grid, double iso);

// Occupied wherever value <= 0.
BinaryGrid occupancy(const SdfGrid& grid);

// n area-uniform surface samples; deterministic for a given seed.
PointCloud sample_surface_points(const TriangleMesh& mesh, std::size_t n,
                                 std::uint64_t seed);

// Max-pools occupancy down to side `out_side` (source side must be a
// multiple). Used for coarse voxel conditions.
BinaryGrid downsample_occupancy(const BinaryGrid& occ, int out_side);

}  // namespace wala
