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

#include <string>
#include <vector>

#include "wala/geometry.hpp"
#include "wala/wavelet.hpp"

namespace wala {

struct ShapeMetrics {
  std::string id;
  std::string dataset_tag;
  double iou = 0.0;
  double chamfer = 0.0;
  double mse = 0.0;
};

struct Aggregates {
  double mean_iou = 0.0;
  double mean_chamfer = 0.0;
  double mean_mse = 0.0;
  double d_iou = 0.0;  // mean of per-tag means
  double d_mse = 0.0;
};

struct MetricReport {
  std::vector<ShapeMetrics> rows;
  Aggregates aggregates;
  int chamfer_samples = 2048;  // convention recorded in the report header
};

// |a AND b| / |a OR b|; both grids empty counts as 1.
double iou(const BinaryGrid& a, const BinaryGrid& b);

// Symmetric mean of squared nearest-neighbour distances between n_samples
// area-uniform surface draws of each mesh; both meshes are sampled with the
// same seed, so swapping the arguments swaps the sample sets and leaves the
// value unchanged. Exact brute-force nearest neighbours.
double chamfer(const TriangleMesh& a, const TriangleMesh& b,
               std::size_t n_samples, std::uint64_t seed);

double grid_mse(const SdfGrid& a, const SdfGrid& b);
double grid_mse(const DiffusibleTree& a, const DiffusibleTree& b);

// D-aggregates: mean over tags of the per-tag means.
Aggregates balanced_aggregate(const std::vector<ShapeMetrics>& rows);

}  // namespace wala
