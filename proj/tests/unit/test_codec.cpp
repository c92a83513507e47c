#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "support/eq1_oracle.hpp"
#include "wala/codec.hpp"
#include "wala/metrics.hpp"

using namespace wala;

TEST_SUITE_BEGIN("codec");

namespace {

DiffusibleTree random_tree(int side, std::uint64_t seed, double scale = 1.0) {
  DiffusibleTree t;
  t.side = side;
  t.data.resize(t.cells() * DiffusibleTree::kChannels);
  Rng rng(seed);
  for (auto& v : t.data) v = scale * rng.normal();
  return t;
}

double tree_rel_err(const DiffusibleTree& a, const DiffusibleTree& b) {
  double err = 0.0, scale = 0.0;
  for (std::size_t i = 0; i < a.data.size(); ++i) {
    err = std::max(err, std::abs(a.data[i] - b.data[i]));
    scale = std::max(scale, std::abs(a.data[i]));
  }
  return err / std::max(scale, 1e-30);
}

}  // namespace

TEST_CASE("full-rank codec is the identity") {
  std::vector<DiffusibleTree> trees;
  for (int i = 0; i < 3; ++i) {
    trees.push_back(random_tree(4, static_cast<std::uint64_t>(40 + i)));
  }
  const int b = 1;
  const int d = b * b * b * 64;
  const LinearCodec codec = fit_codec(trees, b, d, {}, 7);

  const DiffusibleTree held_out = random_tree(4, 999);
  const DiffusibleTree back = decode(codec, encode(codec, held_out));
  CHECK(tree_rel_err(held_out, back) <= 1e-4);
}

TEST_CASE("rank-1 data is captured exactly by d=1") {
  Rng rng(5);
  std::vector<double> direction(64);
  for (auto& v : direction) v = rng.normal();
  std::vector<DiffusibleTree> trees;
  for (int i = 0; i < 4; ++i) {
    DiffusibleTree t;
    t.side = 2;
    t.data.resize(t.cells() * 64);
    for (int z = 0; z < 2; ++z) {
      for (int y = 0; y < 2; ++y) {
        for (int x = 0; x < 2; ++x) {
          const double a = rng.uniform(-2.0, 2.0);
          for (int ch = 0; ch < 64; ++ch) {
            t.at(ch, x, y, z) = a * direction[static_cast<std::size_t>(ch)];
          }
        }
      }
    }
    trees.push_back(std::move(t));
  }
  const LinearCodec codec = fit_codec(trees, 1, 1, {}, 3);
  const DiffusibleTree back = decode(codec, encode(codec, trees[0]));
  double worst = 0.0;
  for (std::size_t i = 0; i < back.data.size(); ++i) {
    worst = std::max(worst, std::abs(back.data[i] - trees[0].data[i]));
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("encoding is linear") {
  std::vector<DiffusibleTree> trees = {random_tree(4, 1), random_tree(4, 2)};
  const LinearCodec codec = fit_codec(trees, 2, 3, {}, 11);

  DiffusibleTree zero = trees[0];
  std::fill(zero.data.begin(), zero.data.end(), 0.0);
  const LatentGrid z0 = encode(codec, zero);
  for (double v : z0.cells) CHECK(v == 0.0);

  const LatentGrid z1 = encode(codec, trees[0]);
  DiffusibleTree scaled = trees[0];
  for (auto& v : scaled.data) v *= -2.5;
  const LatentGrid z2 = encode(codec, scaled);
  for (std::size_t i = 0; i < z1.cells.size(); ++i) {
    CHECK(z2.cells[i] == doctest::Approx(-2.5 * z1.cells[i]).epsilon(1e-10));
  }
}

TEST_CASE("reference configuration: 46 -> pad 48 -> 12^3 x 4 latent") {
  DiffusibleTree tree = random_tree(46, 123, 0.01);
  LinearCodec codec;
  codec.block = 4;
  codec.latent_dim = 4;
  const std::size_t p = static_cast<std::size_t>(codec.block_size());
  codec.enc.assign(p * 4, 0.0);
  codec.dec.assign(4 * p, 0.0);
  for (std::size_t j = 0; j < 4; ++j) codec.enc[j * 4 + j] = 1.0;

  const LatentGrid latent = encode(codec, tree);
  CHECK(latent.side == 12);
  CHECK(latent.cell_count() * static_cast<std::size_t>(latent.dim) == 6912);

  GridSpec spec = GridSpec::centered(256, 1.0);
  CHECK(compression_ratio(spec, latent) ==
        doctest::Approx(16777216.0 / 6912.0).epsilon(1e-12));
}

TEST_CASE("compression ratio arithmetic") {
  GridSpec spec = GridSpec::centered(64, 1.0);
  LatentGrid latent(8, 4);
  CHECK(compression_ratio(spec, latent) == doctest::Approx(128.0));

  GridSpec tiny = GridSpec::centered(8, 1.0);
  LatentGrid full(8, 1);
  CHECK(compression_ratio(tiny, full) == doctest::Approx(1.0));
}

TEST_CASE("weighted fit reduces error on emphasized coordinates") {
  // Paired comparison over 20 trees: the weighted codec must do no worse on
  // the up-weighted coordinates than the unweighted codec, summed over the
  // corpus.
  std::vector<DiffusibleTree> trees;
  for (int i = 0; i < 20; ++i) {
    DiffusibleTree t = random_tree(4, static_cast<std::uint64_t>(500 + i));
    for (std::size_t j = 0; j < t.data.size(); ++j) {
      if (j % 7 == 0) t.data[j] *= 4.0;
    }
    trees.push_back(std::move(t));
  }
  const int b = 2, d = 6;
  const std::vector<double> weights = adaptive_block_weights(trees, b, 0.04);
  const LinearCodec weighted = fit_codec(trees, b, d, weights, 21);
  const LinearCodec plain = fit_codec(trees, b, d, {}, 21);

  const std::size_t cells = static_cast<std::size_t>(b) * b * b;
  double werr = 0.0, perr = 0.0;
  for (const auto& tree : trees) {
    const DiffusibleTree wb = decode(weighted, encode(weighted, tree));
    const DiffusibleTree pb = decode(plain, encode(plain, tree));
    for (std::size_t i = 0; i < tree.data.size(); ++i) {
      const std::size_t ch = i / tree.cells();
      const double w = weights[ch * cells];  // per-channel weights
      if (w >= 0.5) {
        werr += (wb.data[i] - tree.data[i]) * (wb.data[i] - tree.data[i]);
        perr += (pb.data[i] - tree.data[i]) * (pb.data[i] - tree.data[i]);
      }
    }
  }
  CHECK(werr <= perr * (1.0 + 1e-9));
}

TEST_CASE("capacity is monotone in d") {
  std::vector<DiffusibleTree> trees;
  for (int i = 0; i < 6; ++i) {
    trees.push_back(random_tree(4, static_cast<std::uint64_t>(900 + i)));
  }
  double prev = 1e300;
  for (int d : {1, 2, 4, 8}) {
    const LinearCodec codec = fit_codec(trees, 1, d, {}, 77);
    double mse = 0.0;
    for (const auto& tree : trees) {
      const DiffusibleTree back = decode(codec, encode(codec, tree));
      mse += grid_mse(back, tree);
    }
    CHECK(mse <= prev * (1.0 + 1e-9));
    prev = mse;
  }
}

TEST_CASE("fit_codec rejects insufficient data") {
  std::vector<DiffusibleTree> trees = {random_tree(2, 1)};  // 1 block at b=2
  CHECK_THROWS_AS(fit_codec(trees, 2, 5, {}, 0), FitError);
}

TEST_CASE("k-means: K=1 is the mean") {
  Rng rng(4);
  std::vector<double> data;
  const int n = 100, dim = 3;
  std::vector<double> mean(static_cast<std::size_t>(dim), 0.0);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < dim; ++c) {
      const double v = rng.uniform(-1.0, 1.0);
      data.push_back(v);
      mean[static_cast<std::size_t>(c)] += v / n;
    }
  }
  const Codebook book = fit_codebook(data, dim, 1, 10, 0);
  for (int c = 0; c < dim; ++c) {
    CHECK(book.entries[static_cast<std::size_t>(c)] ==
          doctest::Approx(mean[static_cast<std::size_t>(c)]).epsilon(1e-12));
  }
}

TEST_CASE("k-means: K equal to the number of distinct points is exact") {
  Rng rng(9);
  std::vector<double> data;
  const int n = 40, dim = 2;
  for (int i = 0; i < n * dim; ++i) data.push_back(rng.normal());
  const Codebook book = fit_codebook(data, dim, n, 30, 1);
  REQUIRE(!book.fit_errors.empty());
  CHECK(book.fit_errors.back() <= 1e-20);
}

TEST_CASE("lloyd error is non-increasing") {
  Rng rng(13);
  std::vector<double> data;
  for (int i = 0; i < 2000 * 4; ++i) data.push_back(rng.normal());
  const Codebook book = fit_codebook(data, 4, 32, 40, 3);
  for (std::size_t i = 1; i < book.fit_errors.size(); ++i) {
    CHECK(book.fit_errors[i] <= book.fit_errors[i - 1] * (1.0 + 1e-12));
  }
}

TEST_CASE("quantize: members map to themselves with zero loss") {
  Codebook book;
  book.dim = 2;
  book.entries = {0, 0, 1, 0, 0, 1, -1, -1};
  LatentGrid z(1, 2);
  z.cells = {1, 0};
  const auto [q, losses] = quantize(z, book);
  CHECK(q.indices[0] == 1);
  CHECK(losses.codebook_loss == 0.0);
  CHECK(losses.commitment_loss == 0.0);
}

TEST_CASE("quantize ties resolve to the lowest index") {
  Codebook book;
  book.dim = 2;
  book.entries.assign(8 * 2, 100.0);
  book.entries[3 * 2 + 0] = 1.0;
  book.entries[3 * 2 + 1] = 0.0;
  book.entries[7 * 2 + 0] = -1.0;
  book.entries[7 * 2 + 1] = 0.0;
  LatentGrid z(1, 2);
  z.cells = {0.0, 0.0};
  const auto [q, losses] = quantize(z, book);
  CHECK(q.indices[0] == 3);
}

TEST_CASE("quantize losses equal the brute-force nearest distance mean") {
  Rng rng(31);
  std::vector<double> data;
  for (int i = 0; i < 600 * 4; ++i) data.push_back(rng.normal());
  const Codebook book = fit_codebook(data, 4, 64, 15, 5);

  LatentGrid z(3, 4);
  for (auto& v : z.cells) v = rng.normal();
  const auto [q, losses] = quantize(z, book);

  double expected = 0.0;
  for (std::size_t cell = 0; cell < z.cell_count(); ++cell) {
    double best = 1e300;
    for (int k = 0; k < book.size(); ++k) {
      double d2 = 0.0;
      for (int c = 0; c < 4; ++c) {
        const double diff = z.cell(cell)[c] - book.entry(k)[c];
        d2 += diff * diff;
      }
      best = std::min(best, d2);
    }
    expected += best;
  }
  expected /= static_cast<double>(z.cell_count());
  CHECK(losses.codebook_loss == doctest::Approx(expected).epsilon(1e-12));
  CHECK(losses.commitment_loss == losses.codebook_loss);
}

TEST_CASE("dequantize round trips and rejects bad indices") {
  Codebook book;
  book.dim = 2;
  book.entries = {0, 0, 1, 1};
  QuantizedLatent q;
  q.side = 1;
  q.dim = 2;
  q.indices = {1};
  const LatentGrid z = dequantize(q, book);
  CHECK(z.cells == std::vector<double>{1, 1});

  const auto [q2, losses] = quantize(z, book);
  CHECK(q2.indices == q.indices);

  q.indices = {5};
  CHECK_THROWS_AS(dequantize(q, book), DataError);
}

TEST_CASE("K=1 dequantizes to a constant grid") {
  Codebook book;
  book.dim = 3;
  book.entries = {0.5, -1.0, 2.0};
  QuantizedLatent q;
  q.side = 2;
  q.dim = 3;
  q.indices.assign(8, 0);
  const LatentGrid z = dequantize(q, book);
  for (std::size_t cell = 0; cell < z.cell_count(); ++cell) {
    CHECK(z.cell(cell)[0] == 0.5);
    CHECK(z.cell(cell)[1] == -1.0);
    CHECK(z.cell(cell)[2] == 2.0);
  }
}

TEST_CASE("snap is an exact projection") {
  Rng rng(17);
  std::vector<double> data;
  for (int i = 0; i < 500 * 3; ++i) data.push_back(rng.normal());
  const Codebook book = fit_codebook(data, 3, 16, 20, 2);

  LatentGrid z(2, 3);
  for (auto& v : z.cells) v = rng.normal();
  const LatentGrid once = snap(z, book);
  const LatentGrid twice = snap(once, book);
  CHECK(once.cells == twice.cells);

  LatentGrid member(1, 3);
  std::copy_n(book.entry(4), 3, member.cells.begin());
  CHECK(snap(member, book).cells == member.cells);
}

TEST_CASE("small perturbations inside the Voronoi cell are recovered") {
  Codebook book;
  book.dim = 2;
  book.entries = {0, 0, 2, 0, 0, 2, -2, -1};
  LatentGrid z(1, 2);
  z.cells = {2.0 + 0.4, 0.0 - 0.3};
  const LatentGrid back = snap(z, book);
  CHECK(back.cells == std::vector<double>{2, 0});
}

TEST_CASE("adaptive loss is zero on identical trees") {
  const DiffusibleTree w = random_tree(4, 71);
  const ImportanceSet p0 = importance_set(unpack_tree(w), 0.1);
  CHECK(adaptive_recon_loss(w, w, p0, 9) == 0.0);
}

TEST_CASE("adaptive loss reduces structurally when P0 covers everything") {
  const DiffusibleTree w = random_tree(2, 81);
  const DiffusibleTree w2 = random_tree(2, 82);

  ImportanceSet p0;
  p0.rho = 0.5;
  p0.level_sides = {2, 4};
  for (int level = 0; level < 2; ++level) {
    const int side = p0.level_sides[static_cast<std::size_t>(level)];
    const std::uint32_t n = static_cast<std::uint32_t>(side * side * side);
    for (int s = 0; s < 7; ++s) {
      auto& coords =
          p0.p0[static_cast<std::size_t>(level)][static_cast<std::size_t>(s)];
      for (std::uint32_t i = 0; i < n; ++i) coords.push_back(i);
    }
  }

  const double loss = adaptive_recon_loss(w, w2, p0, 4);

  auto level_mse = [&](int level) {
    double acc = 0.0;
    std::size_t n = 0;
    const int side = p0.level_sides[static_cast<std::size_t>(level)];
    for (int s = 1; s <= 7; ++s) {
      for (int z = 0; z < side; ++z) {
        for (int y = 0; y < side; ++y) {
          for (int x = 0; x < side; ++x) {
            double a, b2;
            if (level == 0) {
              a = w.at(s, x, y, z);
              b2 = w2.at(s, x, y, z);
            } else {
              const int child = 4 * (z % 2) + 2 * (y % 2) + (x % 2);
              a = w.at(8 + (s - 1) * 8 + child, x / 2, y / 2, z / 2);
              b2 = w2.at(8 + (s - 1) * 8 + child, x / 2, y / 2, z / 2);
            }
            acc += (a - b2) * (a - b2);
            ++n;
          }
        }
      }
    }
    return acc / static_cast<double>(n);
  };
  double c0 = 0.0;
  for (int z = 0; z < 2; ++z) {
    for (int y = 0; y < 2; ++y) {
      for (int x = 0; x < 2; ++x) {
        const double d = w.at(0, x, y, z) - w2.at(0, x, y, z);
        c0 += d * d;
      }
    }
  }
  c0 /= 8.0;
  CHECK(loss == doctest::Approx(c0 + 0.5 * (level_mse(0) + level_mse(1)))
                    .epsilon(1e-12));
}

TEST_CASE("adaptive loss matches the independent oracle on random trees") {
  for (int rep = 0; rep < 10; ++rep) {
    const DiffusibleTree w =
        random_tree(8, static_cast<std::uint64_t>(300 + rep));
    const DiffusibleTree w2 =
        random_tree(8, static_cast<std::uint64_t>(400 + rep));
    const ImportanceSet p0 = importance_set(unpack_tree(w), 0.25);
    const std::uint64_t seed = static_cast<std::uint64_t>(rep);
    const double got = adaptive_recon_loss(w, w2, p0, seed);
    const double expected = testoracle::eq1_loss(w, w2, p0, seed);
    CHECK(std::abs(got - expected) <=
          1e-10 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("balanced finetune is a fixed point on the original data") {
  std::vector<DiffusibleTree> trees;
  for (int i = 0; i < 5; ++i) {
    trees.push_back(random_tree(4, static_cast<std::uint64_t>(600 + i)));
  }
  const LinearCodec codec = fit_codec(trees, 2, 4, {}, 55);
  std::vector<LatentGrid> latents;
  for (const auto& t : trees) latents.push_back(encode(codec, t));
  const Codebook book = fit_codebook(collect_cells(latents), 4, 8, 200, 66);

  const auto [codec2, book2] = balanced_finetune(codec, book, trees);
  double enc_diff = 0.0;
  for (std::size_t i = 0; i < codec.enc.size(); ++i) {
    enc_diff = std::max(enc_diff, std::abs(codec.enc[i] - codec2.enc[i]));
  }
  CHECK(enc_diff <= 1e-6);
  double book_diff = 0.0;
  for (std::size_t i = 0; i < book.entries.size(); ++i) {
    book_diff =
        std::max(book_diff, std::abs(book.entries[i] - book2.entries[i]));
  }
  CHECK(book_diff <= 1e-6);
}

TEST_CASE("balanced finetune rejects an empty set") {
  std::vector<DiffusibleTree> trees = {random_tree(4, 1)};
  const LinearCodec codec = fit_codec(trees, 2, 2, {}, 5);
  const Codebook book =
      fit_codebook(collect_cells({encode(codec, trees[0])}), 2, 2, 5, 6);
  CHECK_THROWS_AS(balanced_finetune(codec, book, {}), FitError);
}

TEST_SUITE_END();
