#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "wala/geometry.hpp"
#include "wala/metrics.hpp"
#include "wala/wavelet.hpp"

using namespace wala;

TEST_SUITE_BEGIN("wavelet");

namespace {

SdfGrid random_grid(int n, std::uint64_t seed, double amplitude = 1.0) {
  GridSpec spec = GridSpec::centered(n, 1.0);
  Rng rng(seed);
  std::vector<float> values(spec.voxel_count());
  const double tau = spec.truncation * amplitude;
  for (auto& v : values) v = static_cast<float>(rng.uniform(-tau, tau));
  return SdfGrid(spec, std::move(values));
}

double max_abs_diff(const SdfGrid& a, const SdfGrid& b) {
  double worst = 0.0;
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(a.values[i]) -
                                     static_cast<double>(b.values[i])));
  }
  return worst;
}

double max_abs(const SdfGrid& g) {
  double m = 0.0;
  for (float v : g.values) m = std::max(m, std::abs(static_cast<double>(v)));
  return m;
}

void zero_level(WaveletDecomposition& d, std::size_t level) {
  for (auto& band : d.levels[level].bands) {
    std::fill(band.v.begin(), band.v.end(), 0.0);
  }
}

}  // namespace

TEST_CASE("analysis sides reproduce the reference configuration") {
  CHECK(analysis_sides(256, 3, WaveletFamily::Haar, BoundaryMode::Periodic) ==
        std::vector<int>{128, 64, 32});
  CHECK(analysis_sides(256, 3, WaveletFamily::Cdf97,
                       BoundaryMode::Symmetric) ==
        std::vector<int>{136, 76, 46});
  CHECK(analysis_sides(64, 3, WaveletFamily::Cdf97, BoundaryMode::Symmetric) ==
        std::vector<int>{40, 28, 22});
  CHECK_THROWS_AS(
      analysis_sides(100, 3, WaveletFamily::Haar, BoundaryMode::Periodic),
      ParameterError);
}

TEST_CASE("constant grids have zero detail under haar") {
  GridSpec spec = GridSpec::centered(16, 1.0);
  SdfGrid grid(spec, std::vector<float>(spec.voxel_count(), 0.125f));
  const auto decomp = dwt3(grid, WaveletFilterPair::haar(), 3);
  for (const auto& level : decomp.levels) {
    for (const auto& band : level.bands) {
      for (double c : band.v) CHECK(c == doctest::Approx(0.0).epsilon(1e-12));
    }
  }
  const double expected = 0.125 * std::pow(std::sqrt(2.0), 9);
  for (double c : decomp.c0.v) CHECK(c == doctest::Approx(expected));
}

TEST_CASE("perfect reconstruction for all family/boundary combinations") {
  const std::vector<WaveletFilterPair> configs = {
      WaveletFilterPair::haar(BoundaryMode::Periodic),
      WaveletFilterPair::haar(BoundaryMode::Symmetric),
      WaveletFilterPair::cdf97(BoundaryMode::Periodic),
      WaveletFilterPair::cdf97(BoundaryMode::Symmetric),
  };
  int seed = 100;
  for (const auto& filters : configs) {
    for (int rep = 0; rep < 3; ++rep) {
      const SdfGrid g = random_grid(32, static_cast<std::uint64_t>(seed++));
      const SdfGrid back = idwt3(dwt3(g, filters, 3), filters);
      CHECK(max_abs_diff(g, back) <= 1e-5 * max_abs(g));
    }
  }
}

TEST_CASE("round trip on a voxelized box is exact to 1e-5") {
  const GridSpec spec = GridSpec::centered(32, 1.0);
  const SdfGrid g = voxelize_mesh(make_box_mesh({0, 0, 0}, {0.5, 0.4, 0.45}),
                                  spec);
  for (const auto& filters :
       {WaveletFilterPair::haar(), WaveletFilterPair::cdf97()}) {
    const SdfGrid back = idwt3(dwt3(g, filters, 3), filters);
    CHECK(max_abs_diff(g, back) <= 1e-5);
  }
}

TEST_CASE("dwt3 is linear") {
  const auto filters = WaveletFilterPair::cdf97();
  // Scale inputs so the combination never clamps.
  SdfGrid s1 = random_grid(16, 5, 0.3);
  SdfGrid s2 = random_grid(16, 6, 0.3);
  const double a = 0.7, b = -1.3;
  SdfGrid sc = s1;
  for (std::size_t i = 0; i < sc.values.size(); ++i) {
    sc.values[i] = static_cast<float>(a * s1.values[i] + b * s2.values[i]);
  }
  const auto e1 = dwt3(s1, filters, 3);
  const auto e2 = dwt3(s2, filters, 3);
  const auto ec = dwt3(sc, filters, 3);

  double max_err = 0.0, max_val = 0.0;
  auto compare = [&](const Cube& c1, const Cube& c2, const Cube& cc) {
    for (std::size_t i = 0; i < cc.v.size(); ++i) {
      const double lin = a * c1.v[i] + b * c2.v[i];
      max_err = std::max(max_err, std::abs(lin - cc.v[i]));
      max_val = std::max(max_val, std::abs(lin));
    }
  };
  compare(e1.c0, e2.c0, ec.c0);
  for (std::size_t lvl = 0; lvl < ec.levels.size(); ++lvl) {
    for (int s = 0; s < 7; ++s) {
      compare(e1.levels[lvl].bands[static_cast<std::size_t>(s)],
              e2.levels[lvl].bands[static_cast<std::size_t>(s)],
              ec.levels[lvl].bands[static_cast<std::size_t>(s)]);
    }
  }
  CHECK(max_err <= 1e-5 * std::max(max_val, 1e-9));
}

TEST_CASE("parseval holds for orthonormal haar") {
  const SdfGrid g = random_grid(32, 77);
  const auto decomp = dwt3(g, WaveletFilterPair::haar(), 3);
  double grid_energy = 0.0;
  for (float v : g.values) {
    grid_energy += static_cast<double>(v) * static_cast<double>(v);
  }
  double coef_energy = 0.0;
  for (double c : decomp.c0.v) coef_energy += c * c;
  for (const auto& level : decomp.levels) {
    for (const auto& band : level.bands) {
      for (double c : band.v) coef_energy += c * c;
    }
  }
  CHECK(std::abs(coef_energy - grid_energy) <= 1e-4 * grid_energy);
}

TEST_CASE("all-zero decomposition reconstructs the zero grid") {
  const auto filters = WaveletFilterPair::cdf97();
  auto decomp = dwt3(random_grid(16, 9), filters, 3);
  std::fill(decomp.c0.v.begin(), decomp.c0.v.end(), 0.0);
  for (std::size_t l = 0; l < decomp.levels.size(); ++l) zero_level(decomp, l);
  const SdfGrid zero = idwt3(decomp, filters);
  CHECK(max_abs(zero) <= 1e-12);
}

TEST_CASE("coarse-only reconstruction keeps sphere occupancy above 0.90") {
  // The threshold is a property of the smooth 9/7 pair; blocky haar
  // reconstructions quantize the crossing to coarse cells and land lower.
  const GridSpec spec = GridSpec::centered(64, 1.0);
  const SdfGrid g = sdf_from_shape(ShapeSpec::sphere({0, 0, 0}, 0.55), spec);
  const auto filters = WaveletFilterPair::cdf97();
  auto decomp = dwt3(g, filters, 3);
  for (std::size_t l = 0; l < decomp.levels.size(); ++l) zero_level(decomp, l);
  const SdfGrid smooth = idwt3(decomp, filters);
  CHECK(iou(occupancy(g), occupancy(smooth)) >= 0.90);
}

TEST_CASE("zeroed finest level keeps sphere occupancy above 0.98") {
  const GridSpec spec = GridSpec::centered(64, 1.0);
  const SdfGrid g = sdf_from_shape(ShapeSpec::sphere({0, 0, 0}, 0.55), spec);
  const auto filters = WaveletFilterPair::cdf97();
  auto decomp = dwt3(g, filters, 3);
  zero_level(decomp, 2);  // D2
  const SdfGrid recon = idwt3(decomp, filters);
  CHECK(iou(occupancy(g), occupancy(recon)) >= 0.98);
}

TEST_CASE("tree packing drops D2 losslessly for the retained bands") {
  const auto filters = WaveletFilterPair::cdf97();
  const SdfGrid g = random_grid(32, 31);
  const auto decomp = dwt3(g, filters, 3);
  const DiffusibleTree tree = pack_tree(decomp);

  CHECK(tree.side == decomp.c0.side);
  CHECK(tree.data.size() == tree.cells() * 64);

  const auto back = unpack_tree(tree);
  CHECK(back.c0.v == decomp.c0.v);
  for (int s = 0; s < 7; ++s) {
    CHECK(back.levels[0].bands[static_cast<std::size_t>(s)].v ==
          decomp.levels[0].bands[static_cast<std::size_t>(s)].v);
    CHECK(back.levels[1].bands[static_cast<std::size_t>(s)].v ==
          decomp.levels[1].bands[static_cast<std::size_t>(s)].v);
    for (double c : back.levels[2].bands[static_cast<std::size_t>(s)].v) {
      CHECK(c == 0.0);
    }
  }

  // pack -> unpack -> pack is bit-identical.
  const DiffusibleTree tree2 = pack_tree(back);
  CHECK(tree2.data == tree.data);
}

TEST_CASE("tree spatial side matches the configuration arithmetic") {
  const auto filters = WaveletFilterPair::cdf97();
  const SdfGrid g = random_grid(64, 4);
  const DiffusibleTree tree = pack_tree(dwt3(g, filters, 3));
  CHECK(tree.side == 22);

  const auto haar = WaveletFilterPair::haar();
  const DiffusibleTree tree_h = pack_tree(dwt3(g, haar, 3));
  CHECK(tree_h.side == 8);
}

TEST_CASE("packing requires exactly three levels") {
  const auto filters = WaveletFilterPair::haar();
  const SdfGrid g = random_grid(16, 3);
  CHECK_THROWS_AS(pack_tree(dwt3(g, filters, 2)), ParameterError);
}

TEST_CASE("unpack rejects trees without 64 channels") {
  DiffusibleTree tree;
  tree.side = 4;
  tree.data.assign(tree.cells() * 32, 0.0);
  CHECK_THROWS_AS(unpack_tree(tree), ParameterError);
}

TEST_CASE("importance threshold arithmetic") {
  // Build a decomposition scaffold with handcrafted band values.
  const auto filters = WaveletFilterPair::haar();
  auto decomp = dwt3(random_grid(16, 8), filters, 3);
  auto& band = decomp.levels[0].bands[0];
  std::fill(band.v.begin(), band.v.end(), 0.0);
  band.v[0] = 10.0;
  band.v[1] = 1.0;
  band.v[2] = 0.5;
  for (std::size_t l = 0; l < decomp.levels.size(); ++l) {
    for (int s = 0; s < 7; ++s) {
      if (l == 0 && s == 0) continue;
      auto& other = decomp.levels[l].bands[static_cast<std::size_t>(s)];
      std::fill(other.v.begin(), other.v.end(), 0.0);
    }
  }

  const ImportanceSet set = importance_set(decomp, 0.04);
  CHECK(set.p0[0][0] == std::vector<std::uint32_t>{0, 1, 2});
  for (int s = 1; s < 7; ++s) {
    CHECK(set.p0[0][static_cast<std::size_t>(s)].empty());  // all-zero bands
  }

  band.v[1] = 0.3;
  band.v[2] = 0.0;
  const ImportanceSet set2 = importance_set(decomp, 0.04);
  CHECK(set2.p0[0][0] == std::vector<std::uint32_t>{0});

  // rho -> 0+ keeps every nonzero coordinate.
  const ImportanceSet set3 = importance_set(decomp, 1e-12);
  CHECK(set3.p0[0][0] == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("subband filter keeps everything or only the coarse band") {
  const auto filters = WaveletFilterPair::haar();
  const auto decomp = dwt3(random_grid(16, 21), filters, 3);

  const ImportanceSet all = importance_set(decomp, 1e-12);
  // With random data every coordinate is nonzero, so the filter is identity
  // on D0/D1.
  const auto same = subband_filter(decomp, all);
  for (int lvl = 0; lvl < 2; ++lvl) {
    for (int s = 0; s < 7; ++s) {
      CHECK(same.levels[static_cast<std::size_t>(lvl)]
                .bands[static_cast<std::size_t>(s)]
                .v ==
            decomp.levels[static_cast<std::size_t>(lvl)]
                .bands[static_cast<std::size_t>(s)]
                .v);
    }
  }

  ImportanceSet nothing = all;
  for (auto& level : nothing.p0) {
    for (auto& band : level) band.clear();
  }
  const auto bare = subband_filter(decomp, nothing);
  CHECK(bare.c0.v == decomp.c0.v);
  for (int lvl = 0; lvl < 2; ++lvl) {
    for (int s = 0; s < 7; ++s) {
      for (double c : bare.levels[static_cast<std::size_t>(lvl)]
                          .bands[static_cast<std::size_t>(s)]
                          .v) {
        CHECK(c == 0.0);
      }
    }
  }
}

TEST_CASE("occupancy is non-increasing as rho grows") {
  const GridSpec spec = GridSpec::centered(64, 1.0);
  const std::vector<ShapeSpec> shapes = {
      ShapeSpec::sphere({0.02, -0.05, 0.0}, 0.5),
      ShapeSpec::box({0.0, 0.0, 0.0}, {0.45, 0.35, 0.4}),
      ShapeSpec::torus({0, 0, 0}, 0.5, 0.18),
  };
  const auto filters = WaveletFilterPair::cdf97();
  for (const auto& shape : shapes) {
    const SdfGrid g = sdf_from_shape(shape, spec);
    const auto decomp = dwt3(g, filters, 3);
    const BinaryGrid truth = occupancy(g);
    // Non-increasing up to single-voxel IoU quantization noise, and a strict
    // decrease over the whole rho range.
    double prev = 2.0;
    double first = 0.0, last = 0.0;
    bool first_set = false;
    for (double rho : {0.01, 0.02, 0.04, 0.08}) {
      const auto kept = subband_filter(decomp, importance_set(decomp, rho));
      const double score = iou(truth, occupancy(idwt3(kept, filters)));
      CHECK(score <= prev + 5e-4);
      prev = score;
      if (!first_set) {
        first = score;
        first_set = true;
      }
      last = score;
    }
    CHECK(last < first);
  }
}

TEST_CASE("haar coefficient rotation matches grid rotation exactly") {
  const auto filters = WaveletFilterPair::haar();
  const SdfGrid g = random_grid(16, 55);
  for (int axis = 0; axis < 3; ++axis) {
    for (int turns : {1, 2, 3}) {
      const SdfGrid rotated = [&] {
        Cube cube(g.spec.resolution);
        for (std::size_t i = 0; i < g.values.size(); ++i) {
          cube.v[i] = static_cast<double>(g.values[i]);
        }
        const Cube rc = rotate_cube(cube, axis, turns);
        std::vector<float> vals(rc.v.size());
        for (std::size_t i = 0; i < vals.size(); ++i) {
          vals[i] = static_cast<float>(rc.v[i]);
        }
        return SdfGrid(g.spec, std::move(vals));
      }();

      const auto direct = dwt3(rotated, filters, 3);
      const auto perm = rotate_decomposition(dwt3(g, filters, 3), axis, turns);

      // The permutation itself is exact; the two-path comparison differs only
      // in the axis order of the separable sums, i.e. at machine epsilon.
      auto close = [](const std::vector<double>& a,
                      const std::vector<double>& b) {
        REQUIRE(a.size() == b.size());
        for (std::size_t i = 0; i < a.size(); ++i) {
          CHECK(a[i] == doctest::Approx(b[i]).epsilon(1e-12).scale(1.0));
        }
      };
      close(direct.c0.v, perm.c0.v);
      for (std::size_t lvl = 0; lvl < direct.levels.size(); ++lvl) {
        for (int s = 0; s < 7; ++s) {
          close(direct.levels[lvl].bands[static_cast<std::size_t>(s)].v,
                perm.levels[lvl].bands[static_cast<std::size_t>(s)].v);
        }
      }
    }
  }
}

TEST_CASE("four quarter turns are the identity, bit-exact") {
  const auto filters = WaveletFilterPair::haar();
  const auto decomp = dwt3(random_grid(16, 91), filters, 3);
  for (int axis = 0; axis < 3; ++axis) {
    const auto back = rotate_decomposition(decomp, axis, 4);
    CHECK(back.c0.v == decomp.c0.v);
    for (std::size_t lvl = 0; lvl < decomp.levels.size(); ++lvl) {
      for (int s = 0; s < 7; ++s) {
        CHECK(back.levels[lvl].bands[static_cast<std::size_t>(s)].v ==
              decomp.levels[lvl].bands[static_cast<std::size_t>(s)].v);
      }
    }
  }
}

TEST_CASE("cdf97 trees refuse coefficient rotation") {
  const auto filters = WaveletFilterPair::cdf97();
  const auto decomp = dwt3(random_grid(16, 2), filters, 3);
  CHECK_THROWS_AS(rotate_decomposition(decomp, 2, 1), ParameterError);
}

TEST_SUITE_END();
