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

#include "wala/io.hpp"

namespace wala {

// Everything a full run needs, loadable from a `key = value` config file
// with [section] headers. Unknown keys are rejected; CLI flags override.
struct PipelineConfig {
  // [grid]
  int resolution = 64;
  double half_extent = 1.0;
  double truncation_voxels = 3.0;

  // [wavelet]
  WaveletFamily family = WaveletFamily::Cdf97;
  BoundaryMode boundary = BoundaryMode::Symmetric;
  double rho = 1.0 / 32.0;

  // [codec]
  int block = 4;
  int latent_dim = 4;
  bool weighted = true;

  // [codebook]
  int codebook_size = 1024;
  int codebook_iters = 25;

  // [diffusion]
  int total_steps = 1000;
  int buckets = 32;
  double ridge_lambda = 1e-3;
  double dropout_p = 0.1;
  int draws_per_bucket = 4;

  // [sampler]
  int sampler_steps = 1000;
  double guidance_scale = 1.0;
  bool snap_output = true;
  int sample_count = 2;

  // [eval]
  std::string eval_split = "all";  // all | test | train
  int chamfer_samples = 512;

  // [run]
  std::uint64_t seed = 42;
  double test_fraction = 0.02;

  GridSpec grid_spec() const;
  WaveletFilterPair filters() const;

  void apply(const std::string& section, const std::string& key,
             const std::string& value);
  static PipelineConfig from_file(const std::string& path);
};

// Deterministic per-stage seed derived from the root seed.
std::uint64_t stage_seed(std::uint64_t root, const std::string& label);

// Derived tree metadata for the configured grid/wavelet.
TreeMeta tree_meta(const PipelineConfig& cfg);

// Individual stages; CLI subcommands and `pipeline` share these, so a manual
// composition writes byte-identical files.
SdfGrid load_shape_as_sdf(const std::string& path, const GridSpec& spec);
void stage_voxelize(const PipelineConfig& cfg, const std::string& shape_path,
                    const std::string& out_path);
void stage_dwt(const PipelineConfig& cfg, const std::string& sdf_path,
               const std::string& out_path);
void stage_pack(const std::string& decomp_path, const std::string& out_path);
void stage_fit_codec(const PipelineConfig& cfg,
                     const std::vector<std::string>& tree_paths,
                     const std::string& out_path);
void stage_encode(const PipelineConfig& cfg, const std::string& tree_path,
                  const std::string& codec_path, const std::string& out_path);
void stage_decode(const PipelineConfig& cfg, const std::string& latent_path,
                  const std::string& codec_path, const std::string& out_path);
void stage_fit_codebook(const PipelineConfig& cfg,
                        const std::vector<std::string>& latent_paths,
                        const std::string& out_path);
void stage_train_denoiser(const PipelineConfig& cfg,
                          const std::vector<std::string>& latent_paths,
                          const std::vector<std::string>& condition_paths,
                          const std::string& out_path);
// Full generation chain: noise -> denoise -> (snap) -> decode -> unpack ->
// idwt -> marching cubes -> OBJ.
void stage_sample(const PipelineConfig& cfg, const std::string& denoiser_path,
                  const std::string& codec_path,
                  const std::string& codebook_path,
                  const std::string& condition_path,  // empty = unconditional
                  std::uint64_t sample_seed, const std::string& out_obj);

struct PipelineOutcome {
  std::string report_path;
  std::vector<std::string> sample_paths;
  MetricReport report;
};

// Codec round-trip report over an existing pipeline working directory
// (expects sdf/, tree/, latent/ and codec.lc01 under `work_dir`).
MetricReport evaluate_corpus(const PipelineConfig& cfg,
                             const std::string& manifest_path,
                             const std::string& work_dir);

// End-to-end run over a corpus manifest rooted at `out_dir`.
PipelineOutcome run_pipeline(const PipelineConfig& cfg,
                             const std::string& manifest_path,
                             const std::string& out_dir);

// Writes shape JSON files plus a manifest for a synthetic corpus.
std::string generate_corpus_files(const PipelineConfig& cfg,
                                  const std::map<std::string, int>& recipe,
                                  const std::string& out_dir);

}  // namespace wala
