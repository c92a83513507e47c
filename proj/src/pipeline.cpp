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

#include "wala/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

namespace wala {

namespace fs = std::filesystem;

GridSpec PipelineConfig::grid_spec() const {
  GridSpec spec = GridSpec::centered(resolution, half_extent);
  spec.truncation = truncation_voxels * spec.spacing;
  return spec;
}

WaveletFilterPair PipelineConfig::filters() const {
  return WaveletFilterPair::make(family, boundary);
}

namespace {

bool parse_bool(const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError("expected a boolean, got '" + v + "'");
}

double parse_num(const std::string& v) {
  std::size_t used = 0;
  double d = 0.0;
  try {
    d = std::stod(v, &used);
  } catch (const std::exception&) {
    throw ConfigError("expected a number, got '" + v + "'");
  }
  if (used != v.size()) throw ConfigError("trailing junk in number '" + v + "'");
  return d;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void PipelineConfig::apply(const std::string& section, const std::string& key,
                           const std::string& value) {
  const std::string k = section + "." + key;
  if (k == "grid.resolution") {
    resolution = static_cast<int>(parse_num(value));
  } else if (k == "grid.half_extent") {
    half_extent = parse_num(value);
  } else if (k == "grid.truncation_voxels") {
    truncation_voxels = parse_num(value);
  } else if (k == "wavelet.family") {
    if (value == "haar") {
      family = WaveletFamily::Haar;
      boundary = BoundaryMode::Periodic;
    } else if (value == "cdf97") {
      family = WaveletFamily::Cdf97;
      boundary = BoundaryMode::Symmetric;
    } else {
      throw ConfigError("wavelet.family must be haar or cdf97");
    }
  } else if (k == "wavelet.boundary") {
    if (value == "periodic") {
      boundary = BoundaryMode::Periodic;
    } else if (value == "symmetric") {
      boundary = BoundaryMode::Symmetric;
    } else {
      throw ConfigError("wavelet.boundary must be periodic or symmetric");
    }
  } else if (k == "wavelet.rho") {
    rho = parse_num(value);
  } else if (k == "codec.block") {
    block = static_cast<int>(parse_num(value));
  } else if (k == "codec.dim") {
    latent_dim = static_cast<int>(parse_num(value));
  } else if (k == "codec.weighted") {
    weighted = parse_bool(value);
  } else if (k == "codebook.size") {
    codebook_size = static_cast<int>(parse_num(value));
  } else if (k == "codebook.iters") {
    codebook_iters = static_cast<int>(parse_num(value));
  } else if (k == "diffusion.steps") {
    total_steps = static_cast<int>(parse_num(value));
  } else if (k == "diffusion.buckets") {
    buckets = static_cast<int>(parse_num(value));
  } else if (k == "diffusion.lambda") {
    ridge_lambda = parse_num(value);
  } else if (k == "diffusion.dropout") {
    dropout_p = parse_num(value);
  } else if (k == "diffusion.draws_per_bucket") {
    draws_per_bucket = static_cast<int>(parse_num(value));
  } else if (k == "sampler.steps") {
    sampler_steps = static_cast<int>(parse_num(value));
  } else if (k == "sampler.scale") {
    guidance_scale = parse_num(value);
  } else if (k == "sampler.snap") {
    snap_output = parse_bool(value);
  } else if (k == "sampler.count") {
    sample_count = static_cast<int>(parse_num(value));
  } else if (k == "eval.split") {
    if (value != "all" && value != "test" && value != "train") {
      throw ConfigError("eval.split must be all, test or train");
    }
    eval_split = value;
  } else if (k == "eval.chamfer_samples") {
    chamfer_samples = static_cast<int>(parse_num(value));
  } else if (k == "run.seed") {
    seed = static_cast<std::uint64_t>(parse_num(value));
  } else if (k == "run.test_fraction") {
    test_fraction = parse_num(value);
  } else {
    throw ConfigError("unknown config key '" + k + "'");
  }
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  PipelineConfig cfg;
  std::istringstream in(io::read_text(path));
  std::string line, section;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (t.front() == '[' && t.back() == ']') {
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError(path + ":" + std::to_string(line_no) +
                        ": expected key = value");
    }
    cfg.apply(section, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
  }
  return cfg;
}

std::uint64_t stage_seed(std::uint64_t root, const std::string& label) {
  Rng r = Rng(root).child(label);
  return r.next_u64();
}

TreeMeta tree_meta(const PipelineConfig& cfg) {
  TreeMeta meta;
  meta.spec = cfg.grid_spec();
  meta.family = cfg.family;
  meta.boundary = cfg.boundary;
  meta.side = analysis_sides(cfg.resolution, 3, cfg.family, cfg.boundary).back();
  return meta;
}

SdfGrid load_shape_as_sdf(const std::string& path, const GridSpec& spec) {
  const fs::path p(path);
  if (p.extension() == ".json") {
    return sdf_from_shape(ShapeSpec::from_json(io::read_text(path)), spec);
  }
  if (p.extension() == ".obj") {
    return voxelize_mesh(io::read_obj(path), spec);
  }
  if (p.extension() == ".sdf1") {
    return io::read_sdf(path);
  }
  throw DataError("unsupported shape file '" + path +
                  "' (expected .json, .obj or .sdf1)");
}

void stage_voxelize(const PipelineConfig& cfg, const std::string& shape_path,
                    const std::string& out_path) {
  io::write_sdf(out_path, load_shape_as_sdf(shape_path, cfg.grid_spec()));
}

void stage_dwt(const PipelineConfig& cfg, const std::string& sdf_path,
               const std::string& out_path) {
  const SdfGrid grid = io::read_sdf(sdf_path);
  io::write_decomposition(out_path, dwt3(grid, cfg.filters(), 3));
}

void stage_pack(const std::string& decomp_path, const std::string& out_path) {
  io::write_tree(out_path, pack_tree(io::read_decomposition(decomp_path)));
}

void stage_fit_codec(const PipelineConfig& cfg,
                     const std::vector<std::string>& tree_paths,
                     const std::string& out_path) {
  std::vector<DiffusibleTree> trees;
  trees.reserve(tree_paths.size());
  const TreeMeta meta = tree_meta(cfg);
  for (const auto& p : tree_paths) {
    DiffusibleTree t = io::read_tree(p);
    t.spec = meta.spec;
    t.family = meta.family;
    t.boundary = meta.boundary;
    trees.push_back(std::move(t));
  }
  std::vector<double> weights;
  if (cfg.weighted) {
    weights = adaptive_block_weights(trees, cfg.block, cfg.rho);
  }
  LinearCodec codec = fit_codec(trees, cfg.block, cfg.latent_dim, weights,
                                stage_seed(cfg.seed, "fit-codec"));
  codec.fit_meta.rho = cfg.rho;
  io::write_codec(out_path, codec);
}

void stage_encode(const PipelineConfig& cfg, const std::string& tree_path,
                  const std::string& codec_path, const std::string& out_path) {
  (void)cfg;
  const LinearCodec codec = io::read_codec(codec_path);
  io::write_latent(out_path, encode(codec, io::read_tree(tree_path)));
}

void stage_decode(const PipelineConfig& cfg, const std::string& latent_path,
                  const std::string& codec_path, const std::string& out_path) {
  const LinearCodec codec = io::read_codec(codec_path);
  const LatentGrid latent = io::read_latent(latent_path);
  io::write_tree(out_path, decode(codec, latent, tree_meta(cfg)));
}

void stage_fit_codebook(const PipelineConfig& cfg,
                        const std::vector<std::string>& latent_paths,
                        const std::string& out_path) {
  std::vector<LatentGrid> latents;
  latents.reserve(latent_paths.size());
  for (const auto& p : latent_paths) latents.push_back(io::read_latent(p));
  if (latents.empty()) throw FitError("no latents to fit a codebook on");
  const std::vector<double> cells = collect_cells(latents);
  io::write_codebook(
      out_path,
      fit_codebook(cells, latents.front().dim, cfg.codebook_size,
                   cfg.codebook_iters, stage_seed(cfg.seed, "fit-codebook")));
}

void stage_train_denoiser(const PipelineConfig& cfg,
                          const std::vector<std::string>& latent_paths,
                          const std::vector<std::string>& condition_paths,
                          const std::string& out_path) {
  if (!condition_paths.empty() &&
      condition_paths.size() != latent_paths.size()) {
    throw ParameterError("need one condition per latent (or none at all)");
  }
  std::vector<std::pair<LatentGrid, Condition>> pairs;
  pairs.reserve(latent_paths.size());
  for (std::size_t i = 0; i < latent_paths.size(); ++i) {
    Condition cond = condition_paths.empty()
                         ? Condition::none()
                         : io::read_condition(condition_paths[i]);
    pairs.emplace_back(io::read_latent(latent_paths[i]), std::move(cond));
  }
  DenoiserTrainConfig tc;
  tc.buckets = cfg.buckets;
  tc.ridge_lambda = cfg.ridge_lambda;
  tc.dropout_p = cfg.dropout_p;
  tc.draws_per_bucket = cfg.draws_per_bucket;
  const NoiseSchedule schedule = cosine_schedule(cfg.total_steps);
  io::write_denoiser(out_path,
                     train_denoiser(pairs, schedule, tc,
                                    stage_seed(cfg.seed, "train-denoiser")));
}

void stage_sample(const PipelineConfig& cfg, const std::string& denoiser_path,
                  const std::string& codec_path,
                  const std::string& codebook_path,
                  const std::string& condition_path, std::uint64_t sample_seed,
                  const std::string& out_obj) {
  const PerBucketLinearDenoiser den = io::read_denoiser(denoiser_path);
  const LinearCodec codec = io::read_codec(codec_path);
  Codebook book;
  const bool have_book = !codebook_path.empty();
  if (have_book) book = io::read_codebook(codebook_path);

  SamplerConfig sc;
  sc.steps = make_step_list(den.schedule().total_steps, cfg.sampler_steps);
  sc.guidance_scale = cfg.guidance_scale;
  sc.seed = sample_seed;
  sc.snap_output = cfg.snap_output && have_book;

  const Condition cond = condition_path.empty()
                             ? Condition::none()
                             : io::read_condition(condition_path);
  const LatentGrid z =
      sample(den, cond, sc, den.schedule(), den.side, den.dim,
             have_book ? &book : nullptr);

  const TreeMeta meta = tree_meta(cfg);
  const DiffusibleTree tree = decode(codec, z, meta);
  const SdfGrid grid = idwt3(unpack_tree(tree), cfg.filters());
  const TriangleMesh mesh = marching_cubes(grid, 0.0);
  io::write_obj(out_obj, mesh);
}

std::string generate_corpus_files(const PipelineConfig& cfg,
                                  const std::map<std::string, int>& recipe,
                                  const std::string& out_dir) {
  fs::create_directories(fs::path(out_dir) / "shapes");
  auto corpus = generate_synthetic_corpus(recipe, cfg.grid_spec(),
                                          stage_seed(cfg.seed, "gen-corpus"));
  std::vector<ManifestRecord> records;
  records.reserve(corpus.size());
  for (auto& [shape, rec] : corpus) {
    const std::string rel = "shapes/" + rec.id + ".json";
    io::write_text((fs::path(out_dir) / rel).string(), shape.to_json() + "\n");
    rec.path = rel;
    records.push_back(rec);
  }
  split_corpus(records, cfg.test_fraction, stage_seed(cfg.seed, "split"));
  const std::string manifest = (fs::path(out_dir) / "manifest.tsv").string();
  io::write_manifest(manifest, records);
  return manifest;
}

PipelineOutcome run_pipeline(const PipelineConfig& cfg,
                             const std::string& manifest_path,
                             const std::string& out_dir) {
  const auto records = io::read_manifest(manifest_path);
  if (records.empty()) throw DataError("manifest is empty");
  const fs::path root(out_dir);
  const fs::path manifest_dir = fs::path(manifest_path).parent_path();
  for (const char* sub : {"sdf", "wdc", "tree", "latent", "samples"}) {
    fs::create_directories(root / sub);
  }

  auto resolve = [&](const std::string& p) {
    return fs::path(p).is_absolute() ? p : (manifest_dir / p).string();
  };

  // Per-shape front half: voxelize -> dwt -> pack -> (later) encode.
  std::vector<std::string> tree_paths(records.size());
  parallel_chunks(records.size(), 1, [&](std::size_t i0, std::size_t i1) {
    for (std::size_t i = i0; i < i1; ++i) {
      const auto& rec = records[i];
      const std::string sdf = (root / "sdf" / (rec.id + ".sdf1")).string();
      const std::string wdc = (root / "wdc" / (rec.id + ".wdc")).string();
      const std::string tree = (root / "tree" / (rec.id + ".wtr1")).string();
      stage_voxelize(cfg, resolve(rec.path), sdf);
      stage_dwt(cfg, sdf, wdc);
      stage_pack(wdc, tree);
      tree_paths[i] = tree;
    }
  });

  // Codec fits on the training split.
  std::vector<std::string> train_trees;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].split != "test") train_trees.push_back(tree_paths[i]);
  }
  if (train_trees.empty()) train_trees = tree_paths;
  const std::string codec_path = (root / "codec.lc01").string();
  stage_fit_codec(cfg, train_trees, codec_path);

  std::vector<std::string> latent_paths(records.size());
  parallel_chunks(records.size(), 1, [&](std::size_t i0, std::size_t i1) {
    for (std::size_t i = i0; i < i1; ++i) {
      latent_paths[i] =
          (root / "latent" / (records[i].id + ".lat1")).string();
      stage_encode(cfg, tree_paths[i], codec_path, latent_paths[i]);
    }
  });

  std::vector<std::string> train_latents;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].split != "test") train_latents.push_back(latent_paths[i]);
  }
  if (train_latents.empty()) train_latents = latent_paths;
  const std::string book_path = (root / "codebook.cb01").string();
  stage_fit_codebook(cfg, train_latents, book_path);

  PipelineOutcome outcome;
  if (cfg.sample_count > 0) {
    const std::string denoiser_path = (root / "denoiser.dn01").string();
    stage_train_denoiser(cfg, train_latents, {}, denoiser_path);
    for (int s = 0; s < cfg.sample_count; ++s) {
      const std::string obj =
          (root / "samples" / ("sample_" + std::to_string(s) + ".obj"))
              .string();
      stage_sample(cfg, denoiser_path, codec_path, book_path, "",
                   stage_seed(cfg.seed, "sample-" + std::to_string(s)), obj);
      outcome.sample_paths.push_back(obj);
    }
  }

  outcome.report = evaluate_corpus(cfg, manifest_path, out_dir);
  outcome.report_path = (root / "report.tsv").string();
  io::write_report(outcome.report_path, outcome.report);
  return outcome;
}

MetricReport evaluate_corpus(const PipelineConfig& cfg,
                             const std::string& manifest_path,
                             const std::string& work_dir) {
  const auto records = io::read_manifest(manifest_path);
  const fs::path root(work_dir);
  const LinearCodec codec = io::read_codec((root / "codec.lc01").string());
  const TreeMeta meta = tree_meta(cfg);
  const WaveletFilterPair filters = cfg.filters();

  std::vector<std::size_t> eval_ids;
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (cfg.eval_split == "all" || records[i].split == cfg.eval_split) {
      eval_ids.push_back(i);
    }
  }
  if (eval_ids.empty()) throw DataError("no shapes in the evaluation split");

  std::vector<ShapeMetrics> rows(eval_ids.size());
  parallel_chunks(eval_ids.size(), 1, [&](std::size_t i0, std::size_t i1) {
    for (std::size_t i = i0; i < i1; ++i) {
      const auto& rec = records[eval_ids[i]];
      const SdfGrid original =
          io::read_sdf((root / "sdf" / (rec.id + ".sdf1")).string());
      DiffusibleTree tree =
          io::read_tree((root / "tree" / (rec.id + ".wtr1")).string());
      tree.spec = meta.spec;
      tree.family = meta.family;
      tree.boundary = meta.boundary;
      const LatentGrid latent =
          io::read_latent((root / "latent" / (rec.id + ".lat1")).string());
      const DiffusibleTree decoded = decode(codec, latent, meta);
      const SdfGrid recon = idwt3(unpack_tree(decoded), filters);

      ShapeMetrics m;
      m.id = rec.id;
      m.dataset_tag = rec.dataset_tag;
      m.iou = iou(occupancy(original), occupancy(recon));
      m.mse = grid_mse(decoded, tree);
      try {
        const TriangleMesh mesh_a = marching_cubes(original, 0.0);
        const TriangleMesh mesh_b = marching_cubes(recon, 0.0);
        m.chamfer = chamfer(mesh_a, mesh_b,
                            static_cast<std::size_t>(cfg.chamfer_samples),
                            stage_seed(cfg.seed, "chamfer-" + rec.id));
      } catch (const DataError&) {
        m.chamfer = -1.0;  // no surface; flagged rather than faked
      }
      rows[i] = std::move(m);
    }
  });

  MetricReport report;
  report.rows = std::move(rows);
  report.chamfer_samples = cfg.chamfer_samples;
  report.aggregates = balanced_aggregate(report.rows);
  return report;
}

}  // namespace wala
