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

#include <cstdint>
#include <utility>
#include <vector>

#include "wala/wavelet.hpp"

namespace wala {

// Continuous latent cells, pre-quantization. Cell-major storage: the d
// components of cell (x,y,z) are contiguous, cells ordered x-fastest.
struct LatentGrid {
  int side = 0;  // S
  int dim = 0;   // d
  std::vector<double> cells;

  LatentGrid() = default;
  LatentGrid(int s, int d)
      : side(s), dim(d),
        cells(static_cast<std::size_t>(s) * s * s * d, 0.0) {}

  std::size_t cell_count() const {
    return static_cast<std::size_t>(side) * side * side;
  }
  double* cell(std::size_t c) { return cells.data() + c * dim; }
  const double* cell(std::size_t c) const { return cells.data() + c * dim; }
};

// Per-block linear encoder/decoder over the 64-channel tree. A block covers
// b^3 spatial cells of all 64 channels, flattened channel-major; enc is
// (b^3*64) x d row-major and dec is d x (b^3*64) row-major. With d equal to
// the full block size the pair is the identity.
struct LinearCodec {
  int block = 0;       // b
  int latent_dim = 0;  // d
  std::vector<double> enc;
  std::vector<double> dec;

  struct FitMeta {
    std::vector<double> weights;  // per block coordinate, empty = unweighted
    double rho = 0.0;
    std::uint64_t seed = 0;
    std::size_t n_blocks = 0;
  };
  FitMeta fit_meta;

  int block_size() const { return block * block * block * 64; }
};

struct Codebook {
  int dim = 0;
  std::vector<double> entries;  // K x dim, row-major
  std::vector<std::uint64_t> usage_counts;
  std::vector<double> fit_errors;  // mean quantization error per Lloyd pass

  int size() const {
    return dim == 0 ? 0 : static_cast<int>(entries.size()) / dim;
  }
  const double* entry(int k) const { return entries.data() + static_cast<std::size_t>(k) * dim; }
};

struct QuantizedLatent {
  int side = 0;
  int dim = 0;
  std::vector<std::uint32_t> indices;
};

struct VqLosses {
  double codebook_loss = 0.0;
  double commitment_loss = 0.0;
};

// Shape metadata needed to rebuild a full tree from decoded blocks.
struct TreeMeta {
  int side = 0;
  GridSpec spec;
  WaveletFamily family = WaveletFamily::Haar;
  BoundaryMode boundary = BoundaryMode::Periodic;
};

// Per-coefficient fitting weights derived from importance sets: channels are
// weighted by the average per-coordinate emphasis of the adaptive
// reconstruction loss (important detail coordinates count fully, the rest at
// the random-sampling rate), normalized to max 1.
std::vector<double> adaptive_block_weights(
    const std::vector<DiffusibleTree>& trees, int b, double rho);

// Weighted principal-subspace fit of the per-block linear codec. Deterministic
// for a given seed and input order. Throws FitError when there are fewer
// blocks than latent dimensions.
LinearCodec fit_codec(const std::vector<DiffusibleTree>& trees, int b, int d,
                      const std::vector<double>& weights, std::uint64_t seed);

LatentGrid encode(const LinearCodec& codec, const DiffusibleTree& tree);

// Inverse-shaped map. Without metadata the tree side is S*b; with `meta` the
// decoded tree is cropped to the original (possibly unpadded) side.
DiffusibleTree decode(const LinearCodec& codec, const LatentGrid& latent);
DiffusibleTree decode(const LinearCodec& codec, const LatentGrid& latent,
                      const TreeMeta& meta);

// Lloyd iterations with k-means++ seeding over n x dim row-major data.
// Empty clusters are re-seeded at the current farthest point. Iterations stop
// early once assignments are stable.
Codebook fit_codebook(const std::vector<double>& data, int dim, int k,
                      int iters, std::uint64_t seed);

// Convenience: gathers all cells of the given latents.
std::vector<double> collect_cells(const std::vector<LatentGrid>& latents);

std::pair<QuantizedLatent, VqLosses> quantize(const LatentGrid& latent,
                                              const Codebook& codebook);

LatentGrid dequantize(const QuantizedLatent& q, const Codebook& codebook);

// Nearest-entry projection; equals dequantize(quantize(z)).
LatentGrid snap(const LatentGrid& generated, const Codebook& codebook);

// Adaptive-sampling reconstruction loss over packed trees: full MSE on the
// coarse channel plus, per detail level, the MSE over important coordinates
// and over an equally sized random draw from the complement (one shared draw
// per subband, applied to both trees).
double adaptive_recon_loss(const DiffusibleTree& w, const DiffusibleTree& w2,
                           const ImportanceSet& p0, std::uint64_t seed);

double compression_ratio(const GridSpec& spec, const LatentGrid& latent);

// Re-fits the codec on a balanced corpus starting from the current solution
// and resumes Lloyd iterations on the balanced latents.
std::pair<LinearCodec, Codebook> balanced_finetune(
    const LinearCodec& codec, const Codebook& codebook,
    const std::vector<DiffusibleTree>& balanced_trees, int lloyd_iters = 50);

}  // namespace wala
