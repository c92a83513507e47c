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

#include <map>
#include <string>
#include <vector>

#include "wala/diffusion.hpp"
#include "wala/geometry.hpp"

namespace wala {

struct ManifestRecord {
  std::string id;
  std::string path;
  std::string dataset_tag;
  std::string split;  // "train" or "test"
};

// Randomized primitives and CSG combinations, tagged by family as
// pseudo-datasets. Families: sphere, box, torus, twosphere (union),
// hollowbox (difference).
std::vector<std::pair<ShapeSpec, ManifestRecord>> generate_synthetic_corpus(
    const std::map<std::string, int>& recipe, const GridSpec& spec,
    std::uint64_t seed);

// Tag-stratified split: per tag, floor(count * test_fraction) records become
// "test" (deterministic under the seed), the rest "train".
void split_corpus(std::vector<ManifestRecord>& records, double test_fraction,
                  std::uint64_t seed);

// Per tag: `cap` records drawn without replacement when the tag is large
// enough, otherwise all records duplicated cyclically (reshuffled each cycle)
// up to `cap`. Output size is cap * number of tags.
std::vector<ManifestRecord> balanced_sample(
    const std::vector<ManifestRecord>& records, int cap, std::uint64_t seed);

// Exact 90-degree lattice rotations (index permutations; no interpolation).
SdfGrid rotate_augment(const SdfGrid& grid, int axis, int quarter_turns);
BinaryGrid rotate_augment(const BinaryGrid& grid, int axis, int quarter_turns);
// Point clouds rotate about `center` by the same rotation matrix.
PointCloud rotate_augment(const PointCloud& points, int axis, int quarter_turns,
                          const Vec3& center);
// Trees rotate in coefficient space; haar only (see rotate_decomposition).
DiffusibleTree rotate_augment(const DiffusibleTree& tree, int axis,
                              int quarter_turns);
Condition rotate_augment(const Condition& cond, int axis, int quarter_turns);

// Fixed-length permutation-invariant point-cloud feature: 8^3 occupancy
// histogram over the cloud's bounding cube (normalized to sum 1) plus the
// normalized centroid and per-axis standard deviation. Dimension 512 + 6.
Condition encode_pointcloud_condition(const PointCloud& points);

// Flattened 16^3 occupancy (0/1) plus the occupancy fraction. Dimension 4097.
Condition encode_voxel_condition(const BinaryGrid& occ16);

}  // namespace wala
