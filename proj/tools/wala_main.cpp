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

#include <cstdio>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wala/pipeline.hpp"

namespace {

using namespace wala;

// Exit codes: 0 ok, 1 usage/parameter, 2 data/geometry, 3 numeric/fit.
constexpr int kUsageError = 1;
constexpr int kDataError = 2;
constexpr int kFitError = 3;

struct CommonOpts {
  std::string config_path;
  std::vector<std::string> overrides;  // section.key=value
  long long seed = -1;
  int res = -1;
  std::string wavelet;

  PipelineConfig make_config() const {
    PipelineConfig cfg = config_path.empty()
                             ? PipelineConfig{}
                             : PipelineConfig::from_file(config_path);
    for (const auto& kv : overrides) {
      const auto eq = kv.find('=');
      const auto dot = kv.find('.');
      if (eq == std::string::npos || dot == std::string::npos || dot > eq) {
        throw ConfigError("override must look like section.key=value");
      }
      cfg.apply(kv.substr(0, dot), kv.substr(dot + 1, eq - dot - 1),
                kv.substr(eq + 1));
    }
    if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
    if (res > 0) cfg.resolution = res;
    if (!wavelet.empty()) cfg.apply("wavelet", "family", wavelet);
    return cfg;
  }
};

void add_common(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "config file (key = value)");
  cmd->add_option("--set", o.overrides, "config override section.key=value");
  cmd->add_option("--seed", o.seed, "root seed");
  cmd->add_option("--res", o.res, "grid resolution");
  cmd->add_option("--wavelet", o.wavelet, "wavelet family (haar|cdf97)")
      ->check(CLI::IsMember({"haar", "cdf97"}));
}

std::vector<std::string> expand_inputs(const std::vector<std::string>& paths,
                                       const std::string& manifest) {
  std::vector<std::string> out = paths;
  if (!manifest.empty()) {
    const auto records = io::read_manifest(manifest);
    const auto dir = std::filesystem::path(manifest).parent_path();
    for (const auto& r : records) {
      if (r.split == "test") continue;
      out.push_back(std::filesystem::path(r.path).is_absolute()
                        ? r.path
                        : (dir / r.path).string());
    }
  }
  if (out.empty()) throw ParameterError("no input files given");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"wavelet-latent shape compression and generation toolkit"};
  app.require_subcommand(1);

  CommonOpts opts;

  // voxelize
  auto* voxelize = app.add_subcommand("voxelize", "shape/mesh -> SDF grid");
  std::string vox_in, vox_out;
  voxelize->add_option("--in", vox_in, "shape .json / mesh .obj")->required();
  voxelize->add_option("--out", vox_out, "output .sdf1")->required();
  add_common(voxelize, opts);

  // dwt
  auto* dwt_cmd = app.add_subcommand("dwt", "SDF grid -> wavelet decomposition");
  std::string dwt_in, dwt_out;
  dwt_cmd->add_option("--in", dwt_in, "input .sdf1")->required();
  dwt_cmd->add_option("--out", dwt_out, "output .wdc")->required();
  add_common(dwt_cmd, opts);

  // pack
  auto* pack_cmd = app.add_subcommand("pack", "decomposition -> 64-channel tree");
  std::string pack_in, pack_out;
  pack_cmd->add_option("--in", pack_in, "input .wdc")->required();
  pack_cmd->add_option("--out", pack_out, "output .wtr1")->required();
  add_common(pack_cmd, opts);

  // fit-codec
  auto* fitc = app.add_subcommand("fit-codec", "fit the per-block linear codec");
  std::vector<std::string> fitc_in;
  std::string fitc_manifest, fitc_out;
  fitc->add_option("--trees", fitc_in, "training .wtr1 files");
  fitc->add_option("--manifest", fitc_manifest,
                   "manifest whose train split lists tree files");
  fitc->add_option("--out", fitc_out, "output .lc01")->required();
  add_common(fitc, opts);

  // fit-codebook
  auto* fitb = app.add_subcommand("fit-codebook", "fit the VQ codebook");
  std::vector<std::string> fitb_in;
  std::string fitb_manifest, fitb_out;
  fitb->add_option("--latents", fitb_in, "training .lat1 files");
  fitb->add_option("--manifest", fitb_manifest,
                   "manifest whose train split lists latent files");
  fitb->add_option("--out", fitb_out, "output .cb01")->required();
  add_common(fitb, opts);

  // encode
  auto* enc = app.add_subcommand("encode", "tree -> latent");
  std::string enc_in, enc_codec, enc_out;
  enc->add_option("--in", enc_in, "input .wtr1")->required();
  enc->add_option("--codec", enc_codec, "codec .lc01")->required();
  enc->add_option("--out", enc_out, "output .lat1")->required();
  add_common(enc, opts);

  // decode
  auto* dec = app.add_subcommand("decode", "latent -> tree");
  std::string dec_in, dec_codec, dec_out;
  dec->add_option("--in", dec_in, "input .lat1")->required();
  dec->add_option("--codec", dec_codec, "codec .lc01")->required();
  dec->add_option("--out", dec_out, "output .wtr1")->required();
  add_common(dec, opts);

  // train-denoiser
  auto* train = app.add_subcommand("train-denoiser", "fit the latent denoiser");
  std::vector<std::string> train_latents, train_conds;
  std::string train_out;
  train->add_option("--latents", train_latents, "training .lat1 files")
      ->required();
  train->add_option("--conditions", train_conds,
                    "matching .cnd1 files (optional)");
  train->add_option("--out", train_out, "output .dn01")->required();
  add_common(train, opts);

  // sample
  auto* sam = app.add_subcommand("sample", "generate a mesh from noise");
  std::string sam_den, sam_codec, sam_book, sam_cond, sam_out;
  int sam_steps = -1;
  double sam_scale = -1.0;
  bool sam_snap = false, sam_no_snap = false;
  sam->add_option("--denoiser", sam_den, "denoiser .dn01")->required();
  sam->add_option("--codec", sam_codec, "codec .lc01")->required();
  sam->add_option("--codebook", sam_book, "codebook .cb01");
  sam->add_option("--cond", sam_cond, "condition .cnd1");
  sam->add_option("--out", sam_out, "output .obj")->required();
  sam->add_option("--steps", sam_steps, "denoising steps");
  sam->add_option("--scale", sam_scale, "guidance scale");
  sam->add_flag("--snap", sam_snap, "snap the final latent to the codebook");
  sam->add_flag("--no-snap", sam_no_snap, "keep the pre-quant latent");
  add_common(sam, opts);

  // eval
  auto* eval_cmd = app.add_subcommand("eval", "codec round-trip report");
  std::string eval_manifest, eval_dir, eval_out;
  eval_cmd->add_option("--manifest", eval_manifest, "corpus manifest")
      ->required();
  eval_cmd->add_option("--workdir", eval_dir, "pipeline working directory")
      ->required();
  eval_cmd->add_option("--out", eval_out, "report path (default workdir/report.tsv)");
  add_common(eval_cmd, opts);

  // gen-corpus
  auto* gen = app.add_subcommand("gen-corpus", "write a synthetic corpus");
  std::vector<std::string> gen_counts;
  std::string gen_dir;
  gen->add_option("--family", gen_counts,
                  "family=count (sphere, box, torus, twosphere, hollowbox)")
      ->required();
  gen->add_option("--out-dir", gen_dir, "corpus directory")->required();
  add_common(gen, opts);

  // pipeline
  auto* pipe = app.add_subcommand("pipeline", "end-to-end run over a corpus");
  std::string pipe_shapes, pipe_dir;
  pipe->add_option("--shapes", pipe_shapes, "corpus manifest .tsv")->required();
  pipe->add_option("--out-dir", pipe_dir, "working directory")->required();
  add_common(pipe, opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kUsageError;
  }

  try {
    const PipelineConfig cfg = opts.make_config();

    if (*voxelize) {
      stage_voxelize(cfg, vox_in, vox_out);
    } else if (*dwt_cmd) {
      stage_dwt(cfg, dwt_in, dwt_out);
    } else if (*pack_cmd) {
      stage_pack(pack_in, pack_out);
    } else if (*fitc) {
      stage_fit_codec(cfg, expand_inputs(fitc_in, fitc_manifest), fitc_out);
    } else if (*fitb) {
      stage_fit_codebook(cfg, expand_inputs(fitb_in, fitb_manifest), fitb_out);
    } else if (*enc) {
      stage_encode(cfg, enc_in, enc_codec, enc_out);
    } else if (*dec) {
      stage_decode(cfg, dec_in, dec_codec, dec_out);
    } else if (*train) {
      stage_train_denoiser(cfg, train_latents, train_conds, train_out);
    } else if (*sam) {
      PipelineConfig scfg = cfg;
      if (sam_steps > 0) scfg.sampler_steps = sam_steps;
      if (sam_scale >= 0.0) scfg.guidance_scale = sam_scale;
      if (sam_snap) scfg.snap_output = true;
      if (sam_no_snap) scfg.snap_output = false;
      stage_sample(scfg, sam_den, sam_codec, sam_book, sam_cond,
                   stage_seed(scfg.seed, "sample-cli"), sam_out);
    } else if (*eval_cmd) {
      const MetricReport report = evaluate_corpus(cfg, eval_manifest, eval_dir);
      const std::string out =
          eval_out.empty()
              ? (std::filesystem::path(eval_dir) / "report.tsv").string()
              : eval_out;
      io::write_report(out, report);
      std::printf("report: %s\n", out.c_str());
    } else if (*gen) {
      std::map<std::string, int> recipe;
      for (const auto& kv : gen_counts) {
        const auto eq = kv.find('=');
        if (eq == std::string::npos) {
          throw ParameterError("--family expects family=count");
        }
        recipe[kv.substr(0, eq)] = std::stoi(kv.substr(eq + 1));
      }
      const std::string manifest = generate_corpus_files(cfg, recipe, gen_dir);
      std::printf("manifest: %s\n", manifest.c_str());
    } else if (*pipe) {
      const PipelineOutcome outcome = run_pipeline(cfg, pipe_shapes, pipe_dir);
      std::printf("report: %s\n", outcome.report_path.c_str());
      for (const auto& s : outcome.sample_paths) {
        std::printf("sample: %s\n", s.c_str());
      }
    }
  } catch (const ParameterError& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return kUsageError;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kUsageError;
  } catch (const GeometryError& e) {
    std::fprintf(stderr, "geometry error: %s\n", e.what());
    return kDataError;
  } catch (const DataError& e) {
    std::fprintf(stderr, "data error: %s\n", e.what());
    return kDataError;
  } catch (const FitError& e) {
    std::fprintf(stderr, "fit error: %s\n", e.what());
    return kFitError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kFitError;
  }
  return 0;
}
