#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "wala/pipeline.hpp"

using namespace wala;

TEST_SUITE_BEGIN("pipeline");

namespace {

namespace fs = std::filesystem;

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& tag) {
    path = fs::temp_directory_path() / ("wala_pipe_" + tag);
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& name) const {
    return (path / name).string();
  }
};

PipelineConfig small_config() {
  PipelineConfig cfg;
  cfg.resolution = 32;
  cfg.apply("wavelet", "family", "haar");
  cfg.block = 2;
  cfg.latent_dim = 4;
  cfg.codebook_size = 16;
  cfg.codebook_iters = 8;
  cfg.total_steps = 100;
  cfg.buckets = 8;
  cfg.sampler_steps = 5;
  cfg.sample_count = 1;
  cfg.chamfer_samples = 128;
  cfg.test_fraction = 0.25;
  cfg.seed = 11;
  return cfg;
}

std::string file_bytes(const std::string& path) { return io::read_text(path); }

}  // namespace

TEST_CASE("end-to-end pipeline produces a report and sample meshes") {
  TempDir tmp("e2e");
  PipelineConfig cfg = small_config();
  const std::string manifest = generate_corpus_files(
      cfg, {{"sphere", 7}, {"box", 7}}, tmp / "corpus");

  const PipelineOutcome out = run_pipeline(cfg, manifest, tmp / "work");
  CHECK(fs::exists(out.report_path));
  REQUIRE(out.sample_paths.size() == 1);
  CHECK(fs::exists(out.sample_paths[0]));
  CHECK(out.report.rows.size() == 14);
  for (const auto& row : out.report.rows) {
    CHECK(row.iou >= 0.0);
    CHECK(row.iou <= 1.0);
  }
  // Sampled mesh is a readable OBJ.
  const TriangleMesh mesh = io::read_obj(out.sample_paths[0]);
  CHECK(!mesh.empty());
}

TEST_CASE("same seed, same bytes; different seed, different corpus") {
  TempDir tmp("det");
  PipelineConfig cfg = small_config();
  const std::string m1 =
      generate_corpus_files(cfg, {{"sphere", 6}, {"torus", 6}}, tmp / "c1");
  const std::string m2 =
      generate_corpus_files(cfg, {{"sphere", 6}, {"torus", 6}}, tmp / "c2");
  CHECK(file_bytes(m1) == file_bytes(m2));

  run_pipeline(cfg, m1, tmp / "w1");
  run_pipeline(cfg, m2, tmp / "w2");
  for (const std::string rel :
       {"codec.lc01", "codebook.cb01", "denoiser.dn01", "report.tsv",
        "samples/sample_0.obj", "tree/sphere_0.wtr1",
        "latent/sphere_1.lat1"}) {
    CHECK(file_bytes((fs::path(tmp / "w1") / rel).string()) ==
          file_bytes((fs::path(tmp / "w2") / rel).string()));
  }

  PipelineConfig other = cfg;
  other.seed = 999;
  const std::string m3 =
      generate_corpus_files(other, {{"sphere", 6}, {"torus", 6}}, tmp / "c3");
  CHECK(file_bytes(m1) != file_bytes(m3));
}

TEST_CASE("pipeline equals the composition of individual stages") {
  TempDir tmp("comp");
  PipelineConfig cfg = small_config();
  const std::string manifest =
      generate_corpus_files(cfg, {{"sphere", 14}}, tmp / "corpus");
  run_pipeline(cfg, manifest, tmp / "work");

  // Re-run the front half by hand for one shape and compare bytes.
  const auto records = io::read_manifest(manifest);
  const std::string shape =
      (fs::path(tmp / "corpus") / records[0].path).string();
  stage_voxelize(cfg, shape, tmp / "m.sdf1");
  stage_dwt(cfg, tmp / "m.sdf1", tmp / "m.wdc");
  stage_pack(tmp / "m.wdc", tmp / "m.wtr1");
  stage_encode(cfg, tmp / "m.wtr1",
               (fs::path(tmp / "work") / "codec.lc01").string(),
               tmp / "m.lat1");

  const std::string id = records[0].id;
  CHECK(file_bytes(tmp / "m.sdf1") ==
        file_bytes((fs::path(tmp / "work") / "sdf" / (id + ".sdf1")).string()));
  CHECK(file_bytes(tmp / "m.wtr1") ==
        file_bytes((fs::path(tmp / "work") / "tree" / (id + ".wtr1")).string()));
  CHECK(file_bytes(tmp / "m.lat1") ==
        file_bytes(
            (fs::path(tmp / "work") / "latent" / (id + ".lat1")).string()));
}

TEST_CASE("decode stage inverts encode for a full-rank codec") {
  TempDir tmp("codec");
  PipelineConfig cfg = small_config();
  cfg.latent_dim = cfg.block * cfg.block * cfg.block * 64;  // identity-capable
  cfg.sample_count = 0;  // codec-only run; no generative stage
  const std::string manifest =
      generate_corpus_files(cfg, {{"sphere", 14}}, tmp / "corpus");
  run_pipeline(cfg, manifest, tmp / "work");

  const auto records = io::read_manifest(manifest);
  const std::string id = records[0].id;
  const std::string tree_path =
      (fs::path(tmp / "work") / "tree" / (id + ".wtr1")).string();
  const std::string latent_path =
      (fs::path(tmp / "work") / "latent" / (id + ".lat1")).string();
  stage_decode(cfg, latent_path,
               (fs::path(tmp / "work") / "codec.lc01").string(),
               tmp / "back.wtr1");

  const DiffusibleTree original = io::read_tree(tree_path);
  const DiffusibleTree back = io::read_tree(tmp / "back.wtr1");
  REQUIRE(back.side == original.side);
  double worst = 0.0;
  for (std::size_t i = 0; i < back.data.size(); ++i) {
    worst = std::max(worst, std::abs(back.data[i] - original.data[i]));
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("larger latent dimension does not lose occupancy accuracy") {
  // Sphere corpus: mean IoU at d=4 must be at least the d=2 value.
  const GridSpec spec = GridSpec::centered(48, 1.0);
  const auto filters = WaveletFilterPair::haar();
  const TreeMeta meta{
      analysis_sides(48, 3, filters.family, filters.boundary).back(), spec,
      filters.family, filters.boundary};
  auto corpus = generate_synthetic_corpus({{"sphere", 12}}, spec, 31);
  std::vector<DiffusibleTree> trees;
  std::vector<BinaryGrid> truth;
  for (const auto& [shape, rec] : corpus) {
    const SdfGrid g = sdf_from_shape(shape, spec);
    DiffusibleTree t = pack_tree(dwt3(g, filters, 3));
    t.spec = spec;
    t.family = filters.family;
    t.boundary = filters.boundary;
    trees.push_back(std::move(t));
    truth.push_back(occupancy(g));
  }
  auto mean_iou = [&](int d) {
    const LinearCodec codec = fit_codec(trees, 2, d, {}, 5);
    double acc = 0.0;
    for (std::size_t i = 0; i < trees.size(); ++i) {
      const SdfGrid recon = idwt3(
          unpack_tree(decode(codec, encode(codec, trees[i]), meta)), filters);
      acc += iou(truth[i], occupancy(recon));
    }
    return acc / static_cast<double>(trees.size());
  };
  CHECK(mean_iou(4) >= mean_iou(2) - 1e-12);
}

TEST_CASE("eval split selection narrows the report") {
  TempDir tmp("eval");
  PipelineConfig cfg = small_config();
  const std::string manifest =
      generate_corpus_files(cfg, {{"sphere", 8}, {"box", 8}}, tmp / "corpus");
  run_pipeline(cfg, manifest, tmp / "work");

  PipelineConfig test_only = cfg;
  test_only.eval_split = "test";
  const MetricReport report =
      evaluate_corpus(test_only, manifest, tmp / "work");
  CHECK(report.rows.size() == 4);  // 25% of 16, stratified
}

TEST_SUITE_END();
