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

#include "wala/metrics.hpp"

#include <limits>
#include <map>

namespace wala {

double iou(const BinaryGrid& a, const BinaryGrid& b) {
  if (a.resolution != b.resolution || a.values.size() != b.values.size()) {
    throw ParameterError("occupancy grids must share a resolution");
  }
  std::size_t inter = 0, uni = 0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const bool va = a.values[i] != 0;
    const bool vb = b.values[i] != 0;
    inter += va && vb;
    uni += va || vb;
  }
  if (uni == 0) return 1.0;
  return static_cast<double>(inter) / static_cast<double>(uni);
}

double chamfer(const TriangleMesh& a, const TriangleMesh& b,
               std::size_t n_samples, std::uint64_t seed) {
  if (a.empty() || b.empty()) throw ParameterError("mesh is empty");
  if (n_samples < 1) throw ParameterError("need at least one sample");

  const PointCloud pa = sample_surface_points(a, n_samples, seed);
  const PointCloud pb = sample_surface_points(b, n_samples, seed);

  auto one_direction = [](const PointCloud& from, const PointCloud& to) {
    double acc = 0.0;
    for (std::size_t i = 0; i < from.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < to.size(); ++j) {
        const double dx = from[i][0] - to[j][0];
        const double dy = from[i][1] - to[j][1];
        const double dz = from[i][2] - to[j][2];
        const double d2 = dx * dx + dy * dy + dz * dz;
        if (d2 < best) best = d2;
      }
      acc += best;
    }
    return acc / static_cast<double>(from.size());
  };
  return 0.5 * (one_direction(pa, pb) + one_direction(pb, pa));
}

double grid_mse(const SdfGrid& a, const SdfGrid& b) {
  if (a.values.size() != b.values.size()) {
    throw ParameterError("grids must share a shape");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const double diff =
        static_cast<double>(a.values[i]) - static_cast<double>(b.values[i]);
    acc += diff * diff;
  }
  return acc / static_cast<double>(a.values.size());
}

double grid_mse(const DiffusibleTree& a, const DiffusibleTree& b) {
  if (a.side != b.side || a.data.size() != b.data.size()) {
    throw ParameterError("trees must share a shape");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    const double diff = a.data[i] - b.data[i];
    acc += diff * diff;
  }
  return acc / static_cast<double>(a.data.size());
}

Aggregates balanced_aggregate(const std::vector<ShapeMetrics>& rows) {
  if (rows.empty()) throw ParameterError("no rows to aggregate");
  Aggregates agg;
  std::map<std::string, std::array<double, 3>> per_tag;  // sum iou, mse, count
  for (const auto& r : rows) {
    if (r.dataset_tag.empty()) throw ParameterError("row without a tag");
    agg.mean_iou += r.iou;
    agg.mean_chamfer += r.chamfer;
    agg.mean_mse += r.mse;
    auto& t = per_tag[r.dataset_tag];
    t[0] += r.iou;
    t[1] += r.mse;
    t[2] += 1.0;
  }
  const double n = static_cast<double>(rows.size());
  agg.mean_iou /= n;
  agg.mean_chamfer /= n;
  agg.mean_mse /= n;
  for (const auto& [tag, t] : per_tag) {
    agg.d_iou += t[0] / t[2];
    agg.d_mse += t[1] / t[2];
  }
  agg.d_iou /= static_cast<double>(per_tag.size());
  agg.d_mse /= static_cast<double>(per_tag.size());
  return agg;
}

}  // namespace wala
