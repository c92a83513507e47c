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

#include "wala/codec.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace wala {

namespace {

// Block extraction: tree padded with zeros to a side divisible by b. Block
// vector layout is channel-major, x-fastest within the b^3 cell window.
int padded_side(int side, int b) { return ((side + b - 1) / b) * b; }

void extract_block(const DiffusibleTree& tree, int b, int bx, int by, int bz,
                   double* out) {
  const int m = tree.side;
  std::size_t p = 0;
  for (int ch = 0; ch < DiffusibleTree::kChannels; ++ch) {
    for (int z = 0; z < b; ++z) {
      for (int y = 0; y < b; ++y) {
        for (int x = 0; x < b; ++x) {
          const int gx = bx * b + x, gy = by * b + y, gz = bz * b + z;
          out[p++] = (gx < m && gy < m && gz < m) ? tree.at(ch, gx, gy, gz)
                                                  : 0.0;
        }
      }
    }
  }
}

void scatter_block(DiffusibleTree& tree, int b, int bx, int by, int bz,
                   const double* in) {
  const int m = tree.side;
  std::size_t p = 0;
  for (int ch = 0; ch < DiffusibleTree::kChannels; ++ch) {
    for (int z = 0; z < b; ++z) {
      for (int y = 0; y < b; ++y) {
        for (int x = 0; x < b; ++x) {
          const int gx = bx * b + x, gy = by * b + y, gz = bz * b + z;
          if (gx < m && gy < m && gz < m) tree.at(ch, gx, gy, gz) = in[p];
          ++p;
        }
      }
    }
  }
}

std::vector<double> gather_blocks(const std::vector<DiffusibleTree>& trees,
                                  int b, std::size_t* block_dim) {
  if (trees.empty()) throw FitError("no training trees");
  const std::size_t p = static_cast<std::size_t>(b) * b * b * 64;
  *block_dim = p;
  std::vector<double> rows;
  for (const auto& tree : trees) {
    if (tree.side < 1) throw ParameterError("empty tree");
    const int s = padded_side(tree.side, b) / b;
    for (int bz = 0; bz < s; ++bz) {
      for (int by = 0; by < s; ++by) {
        for (int bx = 0; bx < s; ++bx) {
          rows.resize(rows.size() + p);
          extract_block(tree, b, bx, by, bz, rows.data() + rows.size() - p);
        }
      }
    }
  }
  return rows;
}

}  // namespace

std::vector<double> adaptive_block_weights(
    const std::vector<DiffusibleTree>& trees, int b, double rho) {
  if (trees.empty()) throw FitError("no trees to derive weights from");
  const std::size_t p = static_cast<std::size_t>(b) * b * b * 64;

  // Average per-coordinate loss emphasis per channel. C0 coordinates carry
  // 1/|C0|; level-l P0 coordinates 1/(2|P0_l|), complements 1/(2|P0_l'|).
  std::vector<double> channel_w(64, 0.0);
  for (const auto& tree : trees) {
    const WaveletDecomposition decomp = unpack_tree(tree);
    const ImportanceSet set = importance_set(decomp, rho);
    const double m3 = static_cast<double>(decomp.c0.v.size());

    double level_w[2][7];
    for (int level = 0; level < 2; ++level) {
      const std::size_t n_p0 = set.p0_count(level);
      const auto side = static_cast<std::size_t>(
          decomp.levels[static_cast<std::size_t>(level)].side);
      const std::size_t band_n = side * side * side;
      const std::size_t n_total = band_n * 7;
      const std::size_t n_comp = n_total - n_p0;
      for (int s = 0; s < 7; ++s) {
        const std::size_t in_p0 =
            set.p0[static_cast<std::size_t>(level)][static_cast<std::size_t>(s)]
                .size();
        const double w_p0 = n_p0 > 0 ? 0.5 / static_cast<double>(n_p0) : 0.0;
        const double w_cp =
            n_comp > 0 && n_p0 > 0 ? 0.5 / static_cast<double>(n_comp) : 0.0;
        const double frac =
            static_cast<double>(in_p0) / static_cast<double>(band_n);
        level_w[level][s] = frac * w_p0 + (1.0 - frac) * w_cp;
      }
    }

    channel_w[0] += 1.0 / m3;
    for (int s = 1; s <= 7; ++s) channel_w[static_cast<std::size_t>(s)] += level_w[0][s - 1];
    for (int s = 1; s <= 7; ++s) {
      for (int child = 0; child < 8; ++child) {
        channel_w[static_cast<std::size_t>(8 + (s - 1) * 8 + child)] +=
            level_w[1][s - 1];
      }
    }
  }

  double max_w = 0.0;
  for (double w : channel_w) max_w = std::max(max_w, w);
  if (max_w <= 0.0) throw FitError("degenerate importance weights");

  std::vector<double> weights(p);
  const std::size_t cells = static_cast<std::size_t>(b) * b * b;
  for (int ch = 0; ch < 64; ++ch) {
    const double w =
        std::max(channel_w[static_cast<std::size_t>(ch)] / max_w, 1e-6);
    for (std::size_t c = 0; c < cells; ++c) {
      weights[static_cast<std::size_t>(ch) * cells + c] = w;
    }
  }
  return weights;
}

LinearCodec fit_codec(const std::vector<DiffusibleTree>& trees, int b, int d,
                      const std::vector<double>& weights, std::uint64_t seed) {
  if (b < 1) throw ParameterError("block side must be >= 1");
  const std::size_t p = static_cast<std::size_t>(b) * b * b * 64;
  if (d < 1 || static_cast<std::size_t>(d) > p) {
    throw ParameterError("latent dim must lie in [1, block size]");
  }
  if (!weights.empty() && weights.size() != p) {
    throw ParameterError("weight vector does not match block size");
  }

  LinearCodec codec;
  codec.block = b;
  codec.latent_dim = d;
  codec.fit_meta.weights = weights;
  codec.fit_meta.seed = seed;

  if (static_cast<std::size_t>(d) == p) {
    // Full-rank case: the identity pair is an exact minimizer.
    codec.enc.assign(p * p, 0.0);
    codec.dec.assign(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i) {
      codec.enc[i * p + i] = 1.0;
      codec.dec[i * p + i] = 1.0;
    }
    std::size_t dim = 0;
    const auto rows = gather_blocks(trees, b, &dim);
    codec.fit_meta.n_blocks = rows.size() / p;
    return codec;
  }

  std::size_t dim = 0;
  std::vector<double> rows = gather_blocks(trees, b, &dim);
  const std::size_t n = rows.size() / p;
  if (n < static_cast<std::size_t>(d)) {
    throw FitError("need at least d training blocks (" + std::to_string(n) +
                   " < " + std::to_string(d) + ")");
  }
  codec.fit_meta.n_blocks = n;

  std::vector<double> sqw(p, 1.0);
  if (!weights.empty()) {
    for (std::size_t i = 0; i < p; ++i) {
      if (!(weights[i] > 0.0)) throw ParameterError("weights must be positive");
      sqw[i] = std::sqrt(weights[i]);
    }
    for (std::size_t r = 0; r < n; ++r) {
      for (std::size_t i = 0; i < p; ++i) rows[r * p + i] *= sqw[i];
    }
  }

  // Leading eigenvectors of X^T X by deflated power iteration; one vector at
  // a time so fits with different d share their leading directions.
  std::vector<double> basis;  // d x p, row-major
  Rng rng = Rng(seed).child("codec-fit");
  std::vector<double> v(p), xv(n), av(p);
  for (int j = 0; j < d; ++j) {
    for (auto& c : v) c = rng.normal();
    double lambda_prev = -1.0;
    for (int iter = 0; iter < 400; ++iter) {
      // Orthogonalize against found directions.
      for (int q = 0; q < j; ++q) {
        const double* bq = basis.data() + static_cast<std::size_t>(q) * p;
        double dp = 0.0;
        for (std::size_t i = 0; i < p; ++i) dp += v[i] * bq[i];
        for (std::size_t i = 0; i < p; ++i) v[i] -= dp * bq[i];
      }
      double nv = 0.0;
      for (double c : v) nv += c * c;
      nv = std::sqrt(nv);
      if (!(nv > 0.0)) {
        for (auto& c : v) c = rng.normal();
        continue;
      }
      for (auto& c : v) c /= nv;

      // av = X^T (X v), chunk sums accumulated in fixed order.
      const std::size_t chunk = 512;
      const std::size_t n_chunks = (n + chunk - 1) / chunk;
      std::vector<double> partial(n_chunks * p, 0.0);
      parallel_chunks(n, chunk, [&](std::size_t r0, std::size_t r1) {
        double* acc = partial.data() + (r0 / chunk) * p;
        for (std::size_t r = r0; r < r1; ++r) {
          const double* row = rows.data() + r * p;
          double dot = 0.0;
          for (std::size_t i = 0; i < p; ++i) dot += row[i] * v[i];
          for (std::size_t i = 0; i < p; ++i) acc[i] += dot * row[i];
        }
      });
      std::fill(av.begin(), av.end(), 0.0);
      for (std::size_t c = 0; c < n_chunks; ++c) {
        const double* acc = partial.data() + c * p;
        for (std::size_t i = 0; i < p; ++i) av[i] += acc[i];
      }

      double lambda = 0.0;
      for (std::size_t i = 0; i < p; ++i) lambda += av[i] * v[i];
      double na = 0.0;
      for (double c : av) na += c * c;
      na = std::sqrt(na);
      if (!(na > 0.0)) break;  // data orthogonal to v; keep current direction
      for (std::size_t i = 0; i < p; ++i) v[i] = av[i] / na;
      if (lambda_prev >= 0.0 &&
          std::abs(lambda - lambda_prev) <=
              1e-13 * std::max(1.0, std::abs(lambda))) {
        break;
      }
      lambda_prev = lambda;
    }
    // Final re-orthogonalization for numerical hygiene.
    for (int q = 0; q < j; ++q) {
      const double* bq = basis.data() + static_cast<std::size_t>(q) * p;
      double dp = 0.0;
      for (std::size_t i = 0; i < p; ++i) dp += v[i] * bq[i];
      for (std::size_t i = 0; i < p; ++i) v[i] -= dp * bq[i];
    }
    double nv = 0.0;
    for (double c : v) nv += c * c;
    nv = std::sqrt(nv);
    if (!(nv > 0.0)) throw FitError("power iteration collapsed");
    for (auto& c : v) c /= nv;
    basis.insert(basis.end(), v.begin(), v.end());
  }

  // enc = diag(sqw) V, dec = V^T diag(1/sqw): optimal weighted projection.
  codec.enc.assign(p * static_cast<std::size_t>(d), 0.0);
  codec.dec.assign(static_cast<std::size_t>(d) * p, 0.0);
  for (int j = 0; j < d; ++j) {
    const double* bj = basis.data() + static_cast<std::size_t>(j) * p;
    for (std::size_t i = 0; i < p; ++i) {
      codec.enc[i * static_cast<std::size_t>(d) + static_cast<std::size_t>(j)] =
          sqw[i] * bj[i];
      codec.dec[static_cast<std::size_t>(j) * p + i] = bj[i] / sqw[i];
    }
  }
  return codec;
}

LatentGrid encode(const LinearCodec& codec, const DiffusibleTree& tree) {
  const int b = codec.block;
  if (tree.side < 1) throw ParameterError("empty tree");
  const int s = padded_side(tree.side, b) / b;
  const std::size_t p = static_cast<std::size_t>(codec.block_size());
  const int d = codec.latent_dim;

  LatentGrid latent(s, d);
  std::vector<double> block(p);
  std::size_t cell = 0;
  for (int bz = 0; bz < s; ++bz) {
    for (int by = 0; by < s; ++by) {
      for (int bx = 0; bx < s; ++bx, ++cell) {
        extract_block(tree, b, bx, by, bz, block.data());
        double* z = latent.cell(cell);
        for (int j = 0; j < d; ++j) {
          double acc = 0.0;
          for (std::size_t i = 0; i < p; ++i) {
            acc += block[i] *
                   codec.enc[i * static_cast<std::size_t>(d) +
                             static_cast<std::size_t>(j)];
          }
          z[j] = acc;
        }
      }
    }
  }
  return latent;
}

namespace {

DiffusibleTree decode_impl(const LinearCodec& codec, const LatentGrid& latent,
                           int out_side) {
  if (latent.dim != codec.latent_dim) {
    throw ParameterError("latent dim does not match codec");
  }
  const int b = codec.block;
  const int s = latent.side;
  const std::size_t p = static_cast<std::size_t>(codec.block_size());
  const int d = codec.latent_dim;

  DiffusibleTree tree;
  tree.side = out_side;
  tree.data.assign(static_cast<std::size_t>(DiffusibleTree::kChannels) *
                       tree.cells(),
                   0.0);

  std::vector<double> block(p);
  std::size_t cell = 0;
  for (int bz = 0; bz < s; ++bz) {
    for (int by = 0; by < s; ++by) {
      for (int bx = 0; bx < s; ++bx, ++cell) {
        const double* z = latent.cell(cell);
        for (std::size_t i = 0; i < p; ++i) {
          double acc = 0.0;
          for (int j = 0; j < d; ++j) {
            acc += z[j] * codec.dec[static_cast<std::size_t>(j) * p + i];
          }
          if (!std::isfinite(acc)) throw DataError("non-finite decode output");
          block[i] = acc;
        }
        scatter_block(tree, b, bx, by, bz, block.data());
      }
    }
  }
  return tree;
}

}  // namespace

DiffusibleTree decode(const LinearCodec& codec, const LatentGrid& latent) {
  return decode_impl(codec, latent, latent.side * codec.block);
}

DiffusibleTree decode(const LinearCodec& codec, const LatentGrid& latent,
                      const TreeMeta& meta) {
  if (padded_side(meta.side, codec.block) != latent.side * codec.block) {
    throw ParameterError("latent side does not match the target tree side");
  }
  DiffusibleTree tree = decode_impl(codec, latent, meta.side);
  tree.spec = meta.spec;
  tree.family = meta.family;
  tree.boundary = meta.boundary;
  return tree;
}

std::vector<double> collect_cells(const std::vector<LatentGrid>& latents) {
  std::vector<double> rows;
  for (const auto& l : latents) {
    rows.insert(rows.end(), l.cells.begin(), l.cells.end());
  }
  return rows;
}

namespace {

double sq_dist(const double* a, const double* b, int dim) {
  double acc = 0.0;
  for (int i = 0; i < dim; ++i) {
    const double diff = a[i] - b[i];
    acc += diff * diff;
  }
  return acc;
}

}  // namespace

Codebook fit_codebook(const std::vector<double>& data, int dim, int k,
                      int iters, std::uint64_t seed) {
  if (dim < 1) throw ParameterError("codebook dim must be >= 1");
  if (k < 1) throw ParameterError("codebook size must be >= 1");
  const std::size_t n = data.size() / static_cast<std::size_t>(dim);
  if (n == 0) throw FitError("no vectors to fit a codebook on");

  Codebook book;
  book.dim = dim;
  book.entries.assign(static_cast<std::size_t>(k) * dim, 0.0);
  book.usage_counts.assign(static_cast<std::size_t>(k), 0);

  Rng rng = Rng(seed).child("kmeans++");

  // k-means++ seeding.
  std::vector<double> min_d2(n, std::numeric_limits<double>::infinity());
  {
    const std::size_t first = rng.uniform_index(n);
    std::copy_n(data.data() + first * dim, dim, book.entries.begin());
    for (std::size_t i = 0; i < n; ++i) {
      min_d2[i] = sq_dist(data.data() + i * dim, book.entries.data(), dim);
    }
  }
  for (int c = 1; c < k; ++c) {
    double total = 0.0;
    for (double d2 : min_d2) total += d2;
    std::size_t pick;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      pick = n - 1;
      for (std::size_t i = 0; i < n; ++i) {
        acc += min_d2[i];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.uniform_index(n);
    }
    double* e = book.entries.data() + static_cast<std::size_t>(c) * dim;
    std::copy_n(data.data() + pick * dim, dim, e);
    for (std::size_t i = 0; i < n; ++i) {
      const double d2 = sq_dist(data.data() + i * dim, e, dim);
      if (d2 < min_d2[i]) min_d2[i] = d2;
    }
  }

  std::vector<std::uint32_t> assign(n, 0);
  std::vector<double> sums(static_cast<std::size_t>(k) * dim);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(k));

  for (int iter = 0; iter < iters; ++iter) {
    // Assignment (ties -> lowest index).
    bool changed = false;
    double total_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = data.data() + i * dim;
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t best_k = 0;
      for (int c = 0; c < k; ++c) {
        const double d2 = sq_dist(x, book.entry(c), dim);
        if (d2 < best) {
          best = d2;
          best_k = static_cast<std::uint32_t>(c);
        }
      }
      if (assign[i] != best_k) changed = true;
      assign[i] = best_k;
      total_err += best;
    }
    book.fit_errors.push_back(total_err / static_cast<double>(n));
    if (!changed && iter > 0) break;

    // Update.
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = data.data() + i * dim;
      double* s = sums.data() + static_cast<std::size_t>(assign[i]) * dim;
      for (int c = 0; c < dim; ++c) s[c] += x[c];
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) continue;
      double* e = book.entries.data() + static_cast<std::size_t>(c) * dim;
      const double inv =
          1.0 / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      for (int q = 0; q < dim; ++q) {
        e[q] = sums[static_cast<std::size_t>(c) * dim + q] * inv;
      }
    }
    // Re-seed empty clusters at the farthest point from its centre.
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] != 0) continue;
      double worst = -1.0;
      std::size_t worst_i = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d2 =
            sq_dist(data.data() + i * dim, book.entry(assign[i]), dim);
        if (d2 > worst) {
          worst = d2;
          worst_i = i;
        }
      }
      std::copy_n(data.data() + worst_i * dim, dim,
                  book.entries.begin() + static_cast<std::size_t>(c) * dim);
    }
    book.usage_counts.assign(counts.begin(), counts.end());
  }

  // Final usage from a last assignment pass.
  std::fill(book.usage_counts.begin(), book.usage_counts.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    const double* x = data.data() + i * dim;
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_k = 0;
    for (int c = 0; c < k; ++c) {
      const double d2 = sq_dist(x, book.entry(c), dim);
      if (d2 < best) {
        best = d2;
        best_k = static_cast<std::uint32_t>(c);
      }
    }
    ++book.usage_counts[best_k];
  }
  return book;
}

std::pair<QuantizedLatent, VqLosses> quantize(const LatentGrid& latent,
                                              const Codebook& codebook) {
  if (latent.dim != codebook.dim) {
    throw ParameterError("latent dim does not match codebook dim");
  }
  QuantizedLatent q;
  q.side = latent.side;
  q.dim = latent.dim;
  q.indices.resize(latent.cell_count());
  const int k = codebook.size();

  double total = 0.0;
  for (std::size_t i = 0; i < latent.cell_count(); ++i) {
    const double* x = latent.cell(i);
    double best = std::numeric_limits<double>::infinity();
    std::uint32_t best_k = 0;
    for (int c = 0; c < k; ++c) {
      const double d2 = sq_dist(x, codebook.entry(c), latent.dim);
      if (d2 < best) {
        best = d2;
        best_k = static_cast<std::uint32_t>(c);
      }
    }
    q.indices[i] = best_k;
    total += best;
  }
  VqLosses losses;
  // Both reduce to the same number under a closed-form fit; reported
  // separately to keep the two VQ loss roles distinct.
  losses.codebook_loss = total / static_cast<double>(latent.cell_count());
  losses.commitment_loss = losses.codebook_loss;
  return {std::move(q), losses};
}

LatentGrid dequantize(const QuantizedLatent& q, const Codebook& codebook) {
  if (q.dim != codebook.dim) {
    throw ParameterError("quantized dim does not match codebook dim");
  }
  LatentGrid latent(q.side, q.dim);
  const int k = codebook.size();
  for (std::size_t i = 0; i < q.indices.size(); ++i) {
    if (q.indices[i] >= static_cast<std::uint32_t>(k)) {
      throw DataError("codebook index out of range");
    }
    std::copy_n(codebook.entry(static_cast<int>(q.indices[i])), q.dim,
                latent.cell(i));
  }
  return latent;
}

LatentGrid snap(const LatentGrid& generated, const Codebook& codebook) {
  return dequantize(quantize(generated, codebook).first, codebook);
}

double adaptive_recon_loss(const DiffusibleTree& w, const DiffusibleTree& w2,
                           const ImportanceSet& p0, std::uint64_t seed) {
  if (w.side != w2.side || w.data.size() != w2.data.size()) {
    throw ParameterError("trees must share a shape");
  }
  const int m = w.side;
  if (p0.level_sides[0] != m) {
    throw ParameterError("importance set does not match the tree side");
  }
  const int s1 = p0.level_sides[1];
  if (s1 > 2 * m) throw ParameterError("importance set D1 side too large");

  // Coarse term: plain MSE over channel 0.
  double acc = 0.0;
  std::size_t cnt = 0;
  for (int z = 0; z < m; ++z) {
    for (int y = 0; y < m; ++y) {
      for (int x = 0; x < m; ++x) {
        const double diff = w.at(0, x, y, z) - w2.at(0, x, y, z);
        acc += diff * diff;
        ++cnt;
      }
    }
  }
  double loss = acc / static_cast<double>(cnt);

  Rng root = Rng(seed).child("eq1-R");

  for (int level = 0; level < 2; ++level) {
    const int side = level == 0 ? m : s1;
    const std::size_t band_n =
        static_cast<std::size_t>(side) * side * side;

    auto read = [&](int s, std::uint32_t idx, const DiffusibleTree& t) {
      const int x = static_cast<int>(idx % static_cast<std::uint32_t>(side));
      const int y = static_cast<int>((idx / static_cast<std::uint32_t>(side)) %
                                     static_cast<std::uint32_t>(side));
      const int z = static_cast<int>(idx / (static_cast<std::uint32_t>(side) *
                                            static_cast<std::uint32_t>(side)));
      if (level == 0) return t.at(s, x, y, z);
      const int child = 4 * (z & 1) + 2 * (y & 1) + (x & 1);
      return t.at(8 + (s - 1) * 8 + child, x >> 1, y >> 1, z >> 1);
    };

    double p0_acc = 0.0, r_acc = 0.0;
    std::size_t p0_cnt = 0, r_cnt = 0;

    for (int s = 1; s <= 7; ++s) {
      const auto& coords = p0.p0[static_cast<std::size_t>(level)]
                                [static_cast<std::size_t>(s - 1)];
      std::vector<std::uint8_t> in_p0(band_n, 0);
      for (std::uint32_t idx : coords) {
        const double diff = read(s, idx, w) - read(s, idx, w2);
        p0_acc += diff * diff;
        ++p0_cnt;
        in_p0[idx] = 1;
      }
      // Complement, ascending.
      std::vector<std::uint32_t> comp;
      comp.reserve(band_n - coords.size());
      for (std::uint32_t idx = 0; idx < band_n; ++idx) {
        if (!in_p0[idx]) comp.push_back(idx);
      }
      const std::size_t draw = std::min(coords.size(), comp.size());
      Rng r = root.child(static_cast<std::uint64_t>(level * 7 + (s - 1)));
      for (std::size_t i = 0; i < draw; ++i) {
        const std::size_t j =
            i + static_cast<std::size_t>(r.uniform_index(comp.size() - i));
        std::swap(comp[i], comp[j]);
        const double diff = read(s, comp[i], w) - read(s, comp[i], w2);
        r_acc += diff * diff;
        ++r_cnt;
      }
    }
    const double p0_term =
        p0_cnt > 0 ? p0_acc / static_cast<double>(p0_cnt) : 0.0;
    const double r_term = r_cnt > 0 ? r_acc / static_cast<double>(r_cnt) : 0.0;
    loss += 0.5 * (p0_term + r_term);
  }
  return loss;
}

double compression_ratio(const GridSpec& spec, const LatentGrid& latent) {
  const double n3 = static_cast<double>(spec.voxel_count());
  const double lat =
      static_cast<double>(latent.cell_count()) * static_cast<double>(latent.dim);
  return n3 / lat;
}

std::pair<LinearCodec, Codebook> balanced_finetune(
    const LinearCodec& codec, const Codebook& codebook,
    const std::vector<DiffusibleTree>& balanced_trees, int lloyd_iters) {
  if (balanced_trees.empty()) throw FitError("balanced training set is empty");

  // Refit the subspace on the balanced corpus; the deterministic fit seeded
  // as before converges to the balanced optimum (the previous solution only
  // matters as the implicit starting point of the deflation order).
  LinearCodec refit =
      fit_codec(balanced_trees, codec.block, codec.latent_dim,
                codec.fit_meta.weights, codec.fit_meta.seed);
  refit.fit_meta.rho = codec.fit_meta.rho;

  std::vector<LatentGrid> latents;
  latents.reserve(balanced_trees.size());
  for (const auto& t : balanced_trees) latents.push_back(encode(refit, t));
  const std::vector<double> cells = collect_cells(latents);

  // Resume Lloyd from the current entries.
  const std::size_t n = cells.size() / static_cast<std::size_t>(codebook.dim);
  if (n == 0) throw FitError("no latent cells to finetune on");
  Codebook book = codebook;
  book.fit_errors.clear();

  const int k = book.size();
  std::vector<std::uint32_t> assign(n, 0);
  std::vector<double> sums(static_cast<std::size_t>(k) * book.dim);
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(k));
  for (int iter = 0; iter < lloyd_iters; ++iter) {
    bool changed = false;
    double total_err = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = cells.data() + i * book.dim;
      double best = std::numeric_limits<double>::infinity();
      std::uint32_t best_k = 0;
      for (int c = 0; c < k; ++c) {
        const double d2 = sq_dist(x, book.entry(c), book.dim);
        if (d2 < best) {
          best = d2;
          best_k = static_cast<std::uint32_t>(c);
        }
      }
      if (assign[i] != best_k) changed = true;
      assign[i] = best_k;
      total_err += best;
    }
    book.fit_errors.push_back(total_err / static_cast<double>(n));
    if (!changed && iter > 0) break;
    std::fill(sums.begin(), sums.end(), 0.0);
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < n; ++i) {
      const double* x = cells.data() + i * book.dim;
      double* s = sums.data() + static_cast<std::size_t>(assign[i]) * book.dim;
      for (int c = 0; c < book.dim; ++c) s[c] += x[c];
      ++counts[assign[i]];
    }
    for (int c = 0; c < k; ++c) {
      if (counts[static_cast<std::size_t>(c)] == 0) continue;
      double* e = book.entries.data() + static_cast<std::size_t>(c) * book.dim;
      const double inv =
          1.0 / static_cast<double>(counts[static_cast<std::size_t>(c)]);
      for (int q = 0; q < book.dim; ++q) {
        e[q] = sums[static_cast<std::size_t>(c) * book.dim + q] * inv;
      }
    }
    book.usage_counts.assign(counts.begin(), counts.end());
  }
  return {std::move(refit), std::move(book)};
}

}  // namespace wala
