#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "wala/dataset.hpp"
#include "wala/metrics.hpp"

using namespace wala;

TEST_SUITE_BEGIN("dataset");

TEST_CASE("synthetic corpus respects the recipe and repeats under a seed") {
  const GridSpec spec = GridSpec::centered(64, 1.0);
  const std::map<std::string, int> recipe = {{"sphere", 10}, {"torus", 10}};
  const auto corpus = generate_synthetic_corpus(recipe, spec, 5);
  CHECK(corpus.size() == 20);
  std::set<std::string> tags;
  for (const auto& [shape, rec] : corpus) tags.insert(rec.dataset_tag);
  CHECK(tags == std::set<std::string>{"sphere", "torus"});

  const auto again = generate_synthetic_corpus(recipe, spec, 5);
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    CHECK(corpus[i].first.to_json() == again[i].first.to_json());
    CHECK(corpus[i].second.id == again[i].second.id);
  }
}

TEST_CASE("every generated family survives the mesh round trip") {
  const GridSpec spec = GridSpec::centered(48, 1.0);
  const std::map<std::string, int> recipe = {{"sphere", 2},   {"box", 2},
                                             {"torus", 2},    {"twosphere", 2},
                                             {"hollowbox", 2}};
  for (const auto& [shape, rec] : generate_synthetic_corpus(recipe, spec, 9)) {
    const SdfGrid g = sdf_from_shape(shape, spec);
    const TriangleMesh mesh = marching_cubes(g, 0.0);
    CHECK_NOTHROW(voxelize_mesh(mesh, spec));
  }
}

TEST_CASE("split is stratified, floored and deterministic") {
  std::vector<ManifestRecord> records;
  for (int i = 0; i < 100; ++i) {
    records.push_back({"a" + std::to_string(i), "", "alpha", ""});
  }
  split_corpus(records, 0.02, 3);
  int test_n = 0;
  for (const auto& r : records) test_n += r.split == "test";
  CHECK(test_n == 2);

  std::vector<ManifestRecord> lone = {{"only", "", "solo", ""}};
  split_corpus(lone, 0.02, 3);
  CHECK(lone[0].split == "train");

  // Per-tag proportions for a 3-tag corpus.
  std::vector<ManifestRecord> multi;
  for (int i = 0; i < 50; ++i) multi.push_back({"x" + std::to_string(i), "", "x", ""});
  for (int i = 0; i < 20; ++i) multi.push_back({"y" + std::to_string(i), "", "y", ""});
  for (int i = 0; i < 10; ++i) multi.push_back({"z" + std::to_string(i), "", "z", ""});
  split_corpus(multi, 0.1, 8);
  std::map<std::string, int> per_tag;
  for (const auto& r : multi) per_tag[r.dataset_tag] += r.split == "test";
  CHECK(per_tag["x"] == 5);
  CHECK(per_tag["y"] == 2);
  CHECK(per_tag["z"] == 1);

  auto copy = multi;
  split_corpus(copy, 0.1, 8);
  for (std::size_t i = 0; i < multi.size(); ++i) {
    CHECK(copy[i].split == multi[i].split);
  }
}

TEST_CASE("balanced sampling caps and duplicates per tag") {
  std::vector<ManifestRecord> records;
  for (int i = 0; i < 3; ++i) records.push_back({"a" + std::to_string(i), "", "small", ""});
  for (int i = 0; i < 10; ++i) records.push_back({"b" + std::to_string(i), "", "big", ""});

  const auto sampled = balanced_sample(records, 5, 1);
  CHECK(sampled.size() == 10);  // cap x tags

  std::map<std::string, int> small_counts;
  std::set<std::string> big_ids;
  for (const auto& r : sampled) {
    if (r.dataset_tag == "small") small_counts[r.id] += 1;
    if (r.dataset_tag == "big") big_ids.insert(r.id);
  }
  int small_total = 0;
  for (const auto& [id, n] : small_counts) {
    CHECK(n >= 1);  // every original appears at least floor(5/3) = 1 time
    small_total += n;
  }
  CHECK(small_total == 5);
  CHECK(big_ids.size() == 5);  // no duplicates when the tag is large enough

  CHECK_THROWS_AS(balanced_sample({}, 5, 1), ParameterError);
}

TEST_CASE("a 10,000 cap over 19 tags yields a 190,000-record epoch") {
  std::vector<ManifestRecord> records;
  for (int tag = 0; tag < 19; ++tag) {
    for (int i = 0; i < 5; ++i) {
      records.push_back({"t" + std::to_string(tag) + "_" + std::to_string(i),
                         "", "tag" + std::to_string(tag), ""});
    }
  }
  const auto epoch = balanced_sample(records, 10000, 4);
  CHECK(epoch.size() == 190000);
  // Every original record of an under-cap tag appears at least
  // floor(10000/5) = 2000 times.
  std::map<std::string, int> counts;
  for (const auto& r : epoch) counts[r.id] += 1;
  for (const auto& [id, n] : counts) CHECK(n >= 2000);
}

TEST_CASE("four quarter turns are the identity on grids") {
  const GridSpec spec = GridSpec::centered(16, 1.0);
  Rng rng(4);
  std::vector<float> vals(spec.voxel_count());
  for (auto& v : vals) v = static_cast<float>(rng.uniform(-0.1, 0.1));
  const SdfGrid g(spec, vals);
  for (int axis = 0; axis < 3; ++axis) {
    const SdfGrid r = rotate_augment(g, axis, 4);
    CHECK(r.values == g.values);
  }
}

TEST_CASE("occupancy count is rotation invariant") {
  const GridSpec spec = GridSpec::centered(32, 1.0);
  const SdfGrid g =
      sdf_from_shape(ShapeSpec::box({0.1, 0.0, -0.05}, {0.4, 0.3, 0.2}), spec);
  const std::size_t count = occupancy(g).count();
  for (int axis = 0; axis < 3; ++axis) {
    for (int turns = 1; turns <= 3; ++turns) {
      CHECK(occupancy(rotate_augment(g, axis, turns)).count() == count);
    }
  }
}

TEST_CASE("rotating the SDF equals voxelizing the rotated shape") {
  const GridSpec spec = GridSpec::centered(32, 1.0);
  const SdfGrid direct =
      sdf_from_shape(ShapeSpec::box({0, 0, 0}, {0.5, 0.3, 0.2}), spec);
  // One quarter turn about z swaps the x/y half-extents.
  const SdfGrid target =
      sdf_from_shape(ShapeSpec::box({0, 0, 0}, {0.3, 0.5, 0.2}), spec);
  const SdfGrid rotated = rotate_augment(direct, 2, 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < rotated.values.size(); ++i) {
    worst = std::max(worst, std::abs(static_cast<double>(rotated.values[i]) -
                                     static_cast<double>(target.values[i])));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("point rotation matches grid rotation") {
  const GridSpec spec = GridSpec::centered(16, 1.0);
  // A voxel centre must map onto the rotated voxel centre.
  const Vec3 p = spec.position(3, 7, 4);
  const PointCloud rotated = rotate_augment(PointCloud{p}, 2, 1, {0, 0, 0});
  // Grid index rule: out(i,j,k) = in(j, N-1-i, k), so the point at input
  // (3,7,4) appears at output (N-1-7, 3, 4).
  const Vec3 expect = spec.position(spec.resolution - 1 - 7, 3, 4);
  for (int a = 0; a < 3; ++a) {
    CHECK(rotated[0][a] == doctest::Approx(expect[a]).epsilon(1e-12));
  }
}

TEST_CASE("haar tree rotation round-trips through packing") {
  const GridSpec spec = GridSpec::centered(32, 1.0);
  const SdfGrid g =
      sdf_from_shape(ShapeSpec::box({0.1, 0, 0}, {0.4, 0.3, 0.25}), spec);
  const auto filters = WaveletFilterPair::haar();
  const DiffusibleTree tree = pack_tree(dwt3(g, filters, 3));

  const DiffusibleTree rot = rotate_augment(tree, 2, 1);
  const DiffusibleTree back = rotate_augment(rot, 2, 3);
  CHECK(back.data == tree.data);

  // Rotating the tree then reconstructing equals reconstructing then
  // rotating the grid (up to separable-order rounding).
  const SdfGrid recon_rot = idwt3(unpack_tree(rot), filters);
  const SdfGrid rot_recon = rotate_augment(idwt3(unpack_tree(tree), filters), 2, 1);
  double worst = 0.0;
  for (std::size_t i = 0; i < recon_rot.values.size(); ++i) {
    worst = std::max(worst,
                     std::abs(static_cast<double>(recon_rot.values[i]) -
                              static_cast<double>(rot_recon.values[i])));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("point-cloud features are permutation invariant") {
  Rng rng(12);
  PointCloud pts;
  for (int i = 0; i < 500; ++i) {
    pts.push_back({rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0),
                   rng.uniform(-1.0, 1.0)});
  }
  const Condition a = encode_pointcloud_condition(pts);
  CHECK(a.feature.size() == 518);

  PointCloud shuffled = pts;
  for (std::size_t i = shuffled.size(); i > 1; --i) {
    std::swap(shuffled[i - 1], shuffled[rng.uniform_index(i)]);
  }
  const Condition b = encode_pointcloud_condition(shuffled);
  CHECK(a.feature == b.feature);
}

TEST_CASE("a single point gives a one-hot centre bin and zero std") {
  const Condition c = encode_pointcloud_condition({{0.3, -0.8, 2.0}});
  double sum = 0.0;
  for (int i = 0; i < 512; ++i) sum += c.feature[static_cast<std::size_t>(i)];
  CHECK(sum == doctest::Approx(1.0));
  // centre bin (4,4,4)
  CHECK(c.feature[static_cast<std::size_t>(4 + 8 * (4 + 8 * 4))] == 1.0);
  CHECK(c.feature[515] == 0.0);
  CHECK(c.feature[516] == 0.0);
  CHECK(c.feature[517] == 0.0);
  CHECK_THROWS_AS(encode_pointcloud_condition({}), ParameterError);
}

TEST_CASE("sphere surface histogram matches a brute-force binning oracle") {
  const TriangleMesh mesh = make_icosphere({0, 0, 0}, 1.0, 3);
  const PointCloud pts = sample_surface_points(mesh, 2500, 42);
  const Condition c = encode_pointcloud_condition(pts);

  // Independent binning: recompute the bounding cube and histogram.
  Vec3 lo = pts[0], hi = pts[0];
  for (const auto& p : pts) {
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }
  }
  double extent = 0.0;
  for (int a = 0; a < 3; ++a) extent = std::max(extent, hi[a] - lo[a]);
  const Vec3 mid = {(lo[0] + hi[0]) / 2, (lo[1] + hi[1]) / 2,
                    (lo[2] + hi[2]) / 2};
  std::vector<double> oracle(512, 0.0);
  for (const auto& p : pts) {
    int b[3];
    for (int a = 0; a < 3; ++a) {
      const double u = (p[a] - mid[a]) / extent + 0.5;
      b[a] = std::clamp(static_cast<int>(u * 8.0), 0, 7);
    }
    oracle[static_cast<std::size_t>(b[0] + 8 * (b[1] + 8 * b[2]))] +=
        1.0 / 2500.0;
  }
  for (int i = 0; i < 512; ++i) {
    CHECK(c.feature[static_cast<std::size_t>(i)] ==
          doctest::Approx(oracle[static_cast<std::size_t>(i)]).epsilon(1e-12));
  }
  // Interior bins carry no mass for a spherical shell.
  const double centre_mass =
      c.feature[static_cast<std::size_t>(3 + 8 * (3 + 8 * 3))] +
      c.feature[static_cast<std::size_t>(4 + 8 * (4 + 8 * 4))];
  CHECK(centre_mass <= 0.01);
}

TEST_CASE("voxel condition endpoints and fraction") {
  BinaryGrid occ;
  occ.resolution = 16;
  occ.values.assign(4096, 0);
  const Condition empty = encode_voxel_condition(occ);
  CHECK(empty.feature.size() == 4097);
  for (double v : empty.feature) CHECK(v == 0.0);

  std::fill(occ.values.begin(), occ.values.end(), 1);
  const Condition full = encode_voxel_condition(occ);
  for (int i = 0; i < 4096; ++i) CHECK(full.feature[static_cast<std::size_t>(i)] == 1.0);
  CHECK(full.feature[4096] == 1.0);

  occ.resolution = 8;
  occ.values.assign(512, 0);
  CHECK_THROWS_AS(encode_voxel_condition(occ), ParameterError);
}

TEST_CASE("downsampled sphere occupancy fraction tracks the analytic ratio") {
  const GridSpec spec = GridSpec::centered(64, 1.0);
  const double r = 0.7;
  const SdfGrid g = sdf_from_shape(ShapeSpec::sphere({0, 0, 0}, r), spec);
  const BinaryGrid occ16 = downsample_occupancy(occupancy(g), 16);
  const Condition c = encode_voxel_condition(occ16);
  // Max-pooling marks every coarse cell the ball touches: the analytic
  // volume is the Minkowski sum of the ball and one coarse cell.
  const double h = 2.0 / 16.0;
  const double pi = 3.14159265358979;
  const double dilated =
      h * h * h + 6.0 * h * h * r + 3.0 * pi * r * r * h +
      4.0 / 3.0 * pi * r * r * r;
  const double expected = dilated / 8.0;  // domain volume 2^3
  CHECK(std::abs(c.feature[4096] - expected) / expected < 0.10);
}

TEST_CASE("voxel condition rotation commutes with encoding") {
  const GridSpec spec = GridSpec::centered(64, 1.0);
  const SdfGrid g =
      sdf_from_shape(ShapeSpec::box({0.2, 0.0, -0.1}, {0.5, 0.3, 0.25}), spec);
  const BinaryGrid occ16 = downsample_occupancy(occupancy(g), 16);
  const Condition direct = encode_voxel_condition(rotate_augment(occ16, 0, 1));
  const Condition rotated = rotate_augment(encode_voxel_condition(occ16), 0, 1);
  CHECK(direct.feature == rotated.feature);
}

TEST_CASE("point-cloud condition rotation commutes with encoding") {
  Rng rng(3);
  PointCloud pts;
  for (int i = 0; i < 800; ++i) {
    pts.push_back({rng.uniform(-0.9, 0.7), rng.uniform(-0.5, 0.8),
                   rng.uniform(-0.6, 0.6)});
  }
  for (int axis = 0; axis < 3; ++axis) {
    const Condition rotated =
        rotate_augment(encode_pointcloud_condition(pts), axis, 1);
    const Condition direct =
        encode_pointcloud_condition(rotate_augment(pts, axis, 1, {0, 0, 0}));
    REQUIRE(rotated.feature.size() == direct.feature.size());
    for (std::size_t i = 0; i < rotated.feature.size(); ++i) {
      CHECK(rotated.feature[i] ==
            doctest::Approx(direct.feature[i]).epsilon(1e-9).scale(1.0));
    }
  }
}

TEST_SUITE_END();
