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

#include "wala/io.hpp"

#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace wala::io {

namespace {

class Writer {
 public:
  void u32(std::uint32_t v) { raw(&v, sizeof v); }
  void f32(float v) { raw(&v, sizeof v); }
  void f64(double v) { raw(&v, sizeof v); }
  void magic(const char m[4]) { buf_.append(m, 4); }
  void f32s(const std::vector<double>& values) {
    for (double v : values) f32(static_cast<float>(v));
  }
  void f32s(const std::vector<float>& values) {
    for (float v : values) f32(v);
  }

  // Atomic: write to a sibling temp file, then rename over the target.
  void commit(const std::string& path) {
    const std::string tmp = path + ".tmp";
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw DataError("cannot open " + tmp + " for writing");
      out.write(buf_.data(), static_cast<std::streamsize>(buf_.size()));
      if (!out) throw DataError("short write to " + tmp);
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) throw DataError("cannot rename " + tmp + " to " + path);
  }

 private:
  void raw(const void* p, std::size_t n) {
    buf_.append(static_cast<const char*>(p), n);
  }
  std::string buf_;
};

class Reader {
 public:
  explicit Reader(const std::string& path) : path_(path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    buf_ = ss.str();
  }

  void magic(const char m[4]) {
    char got[4];
    raw(got, 4);
    if (std::memcmp(got, m, 4) != 0) {
      throw DataError(path_ + ": bad magic, expected " +
                      std::string(m, 4));
    }
  }
  std::uint32_t u32() {
    std::uint32_t v;
    raw(&v, sizeof v);
    return v;
  }
  float f32() {
    float v;
    raw(&v, sizeof v);
    return v;
  }
  double f64() {
    double v;
    raw(&v, sizeof v);
    return v;
  }
  void f32s(std::vector<double>& out, std::size_t n) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = static_cast<double>(f32());
  }
  void f32s(std::vector<float>& out, std::size_t n) {
    out.resize(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = f32();
  }
  void done() {
    if (pos_ != buf_.size()) {
      throw DataError(path_ + ": trailing bytes after payload");
    }
  }

 private:
  void raw(void* p, std::size_t n) {
    if (pos_ + n > buf_.size()) throw DataError(path_ + ": truncated file");
    std::memcpy(p, buf_.data() + pos_, n);
    pos_ += n;
  }
  std::string path_;
  std::string buf_;
  std::size_t pos_ = 0;
};

std::uint32_t family_code(WaveletFamily f) {
  return f == WaveletFamily::Haar ? 0u : 1u;
}
WaveletFamily family_from(std::uint32_t c) {
  if (c > 1) throw DataError("unknown wavelet family code");
  return c == 0 ? WaveletFamily::Haar : WaveletFamily::Cdf97;
}
std::uint32_t boundary_code(BoundaryMode b) {
  return b == BoundaryMode::Periodic ? 0u : 1u;
}
BoundaryMode boundary_from(std::uint32_t c) {
  if (c > 1) throw DataError("unknown boundary code");
  return c == 0 ? BoundaryMode::Periodic : BoundaryMode::Symmetric;
}

void write_spec(Writer& w, const GridSpec& spec) {
  w.u32(static_cast<std::uint32_t>(spec.resolution));
  for (double o : spec.origin) w.f32(static_cast<float>(o));
  w.f32(static_cast<float>(spec.spacing));
  w.f32(static_cast<float>(spec.truncation));
}

GridSpec read_spec(Reader& r) {
  GridSpec spec;
  spec.resolution = static_cast<int>(r.u32());
  for (double& o : spec.origin) o = static_cast<double>(r.f32());
  spec.spacing = static_cast<double>(r.f32());
  spec.truncation = static_cast<double>(r.f32());
  return spec;
}

}  // namespace

void write_sdf(const std::string& path, const SdfGrid& grid) {
  Writer w;
  w.magic("SDF1");
  write_spec(w, grid.spec);
  w.f32s(grid.values);
  w.commit(path);
}

SdfGrid read_sdf(const std::string& path) {
  Reader r(path);
  r.magic("SDF1");
  const GridSpec spec = read_spec(r);
  if (spec.resolution < 1 || spec.resolution > 4096) {
    throw DataError(path + ": implausible resolution");
  }
  std::vector<float> values;
  r.f32s(values, spec.voxel_count());
  r.done();
  return SdfGrid(spec, std::move(values));
}

void write_tree(const std::string& path, const DiffusibleTree& tree) {
  Writer w;
  w.magic("WTR1");
  w.u32(static_cast<std::uint32_t>(tree.side));
  w.u32(static_cast<std::uint32_t>(DiffusibleTree::kChannels));
  w.f32s(tree.data);
  w.commit(path);
}

DiffusibleTree read_tree(const std::string& path) {
  Reader r(path);
  r.magic("WTR1");
  DiffusibleTree tree;
  tree.side = static_cast<int>(r.u32());
  const std::uint32_t channels = r.u32();
  if (channels != DiffusibleTree::kChannels) {
    throw DataError(path + ": tree must have 64 channels");
  }
  if (tree.side < 1 || tree.side > 1024) {
    throw DataError(path + ": implausible tree side");
  }
  r.f32s(tree.data, tree.cells() * DiffusibleTree::kChannels);
  r.done();
  return tree;
}

void write_decomposition(const std::string& path,
                         const WaveletDecomposition& decomp) {
  Writer w;
  w.magic("WDC1");
  write_spec(w, decomp.spec);
  w.u32(family_code(decomp.family));
  w.u32(boundary_code(decomp.boundary));
  w.u32(static_cast<std::uint32_t>(decomp.levels.size()));
  w.u32(static_cast<std::uint32_t>(decomp.c0.side));
  w.f32s(decomp.c0.v);
  for (const auto& level : decomp.levels) {
    w.u32(static_cast<std::uint32_t>(level.side));
    for (const auto& band : level.bands) w.f32s(band.v);
  }
  w.commit(path);
}

WaveletDecomposition read_decomposition(const std::string& path) {
  Reader r(path);
  r.magic("WDC1");
  WaveletDecomposition d;
  d.spec = read_spec(r);
  d.family = family_from(r.u32());
  d.boundary = boundary_from(r.u32());
  const std::uint32_t levels = r.u32();
  if (levels < 1 || levels > 10) throw DataError(path + ": bad level count");
  const int c0_side = static_cast<int>(r.u32());
  d.c0 = Cube(c0_side);
  r.f32s(d.c0.v, d.c0.v.size());
  d.levels.resize(levels);
  for (auto& level : d.levels) {
    level.side = static_cast<int>(r.u32());
    if (level.side < 1 || level.side > 4096) {
      throw DataError(path + ": bad level side");
    }
    for (auto& band : level.bands) {
      band = Cube(level.side);
      r.f32s(band.v, band.v.size());
    }
  }
  r.done();
  return d;
}

void write_codec(const std::string& path, const LinearCodec& codec) {
  Writer w;
  w.magic("LC01");
  w.u32(static_cast<std::uint32_t>(codec.block));
  w.u32(static_cast<std::uint32_t>(codec.latent_dim));
  w.f32s(codec.enc);
  w.f32s(codec.dec);
  w.commit(path);
}

LinearCodec read_codec(const std::string& path) {
  Reader r(path);
  r.magic("LC01");
  LinearCodec codec;
  codec.block = static_cast<int>(r.u32());
  codec.latent_dim = static_cast<int>(r.u32());
  if (codec.block < 1 || codec.block > 64 || codec.latent_dim < 1) {
    throw DataError(path + ": implausible codec dimensions");
  }
  const std::size_t p = static_cast<std::size_t>(codec.block_size());
  r.f32s(codec.enc, p * static_cast<std::size_t>(codec.latent_dim));
  r.f32s(codec.dec, static_cast<std::size_t>(codec.latent_dim) * p);
  r.done();
  return codec;
}

void write_codebook(const std::string& path, const Codebook& book) {
  Writer w;
  w.magic("CB01");
  w.u32(static_cast<std::uint32_t>(book.size()));
  w.u32(static_cast<std::uint32_t>(book.dim));
  w.f32s(book.entries);
  w.commit(path);
}

Codebook read_codebook(const std::string& path) {
  Reader r(path);
  r.magic("CB01");
  const std::uint32_t k = r.u32();
  const std::uint32_t d = r.u32();
  if (k < 1 || d < 1) throw DataError(path + ": empty codebook");
  Codebook book;
  book.dim = static_cast<int>(d);
  r.f32s(book.entries, static_cast<std::size_t>(k) * d);
  book.usage_counts.assign(k, 0);
  r.done();
  return book;
}

void write_latent(const std::string& path, const LatentGrid& latent) {
  Writer w;
  w.magic("LAT1");
  w.u32(static_cast<std::uint32_t>(latent.side));
  w.u32(static_cast<std::uint32_t>(latent.dim));
  w.f32s(latent.cells);
  w.commit(path);
}

LatentGrid read_latent(const std::string& path) {
  Reader r(path);
  r.magic("LAT1");
  const std::uint32_t s = r.u32();
  const std::uint32_t d = r.u32();
  if (s < 1 || d < 1) throw DataError(path + ": empty latent");
  LatentGrid latent(static_cast<int>(s), static_cast<int>(d));
  r.f32s(latent.cells, latent.cells.size());
  r.done();
  return latent;
}

void write_condition(const std::string& path, const Condition& cond) {
  Writer w;
  w.magic("CND1");
  w.u32(static_cast<std::uint32_t>(cond.kind));
  w.u32(static_cast<std::uint32_t>(cond.feature.size()));
  w.f32s(cond.feature);
  w.commit(path);
}

Condition read_condition(const std::string& path) {
  Reader r(path);
  r.magic("CND1");
  const std::uint32_t kind = r.u32();
  if (kind > 2) throw DataError(path + ": unknown condition variant");
  const std::uint32_t dim = r.u32();
  Condition cond;
  cond.kind = static_cast<Condition::Kind>(kind);
  r.f32s(cond.feature, dim);
  r.done();
  return cond;
}

void write_denoiser(const std::string& path,
                    const PerBucketLinearDenoiser& d) {
  Writer w;
  w.magic("DN01");
  w.u32(static_cast<std::uint32_t>(d.schedule().total_steps));
  w.u32(static_cast<std::uint32_t>(d.side));
  w.u32(static_cast<std::uint32_t>(d.dim));
  w.u32(static_cast<std::uint32_t>(d.cond_dim));
  w.f64(d.dropout_p);
  w.f64(d.clamp_lo_);
  w.f64(d.clamp_hi_);
  w.u32(static_cast<std::uint32_t>(d.bucket_edges.size()));
  for (int e : d.bucket_edges) w.u32(static_cast<std::uint32_t>(e));
  w.u32(static_cast<std::uint32_t>(d.bucket_maps.size()));
  for (const auto& m : d.bucket_maps) {
    w.u32(static_cast<std::uint32_t>(m.size()));
    w.f32s(m);
  }
  w.commit(path);
}

PerBucketLinearDenoiser read_denoiser(const std::string& path) {
  Reader r(path);
  r.magic("DN01");
  PerBucketLinearDenoiser d;
  const int total_steps = static_cast<int>(r.u32());
  d.side = static_cast<int>(r.u32());
  d.dim = static_cast<int>(r.u32());
  d.cond_dim = static_cast<int>(r.u32());
  d.dropout_p = r.f64();
  d.clamp_lo_ = r.f64();
  d.clamp_hi_ = r.f64();
  const std::uint32_t n_edges = r.u32();
  if (n_edges < 2 || n_edges > 100000) throw DataError(path + ": bad buckets");
  d.bucket_edges.resize(n_edges);
  for (auto& e : d.bucket_edges) e = static_cast<int>(r.u32());
  const std::uint32_t n_maps = r.u32();
  if (n_maps + 1 != n_edges) throw DataError(path + ": bucket count mismatch");
  d.bucket_maps.resize(n_maps);
  for (auto& m : d.bucket_maps) {
    const std::uint32_t n = r.u32();
    r.f32s(m, n);
  }
  r.done();
  d.set_schedule(cosine_schedule(total_steps));
  return d;
}

void write_obj(const std::string& path, const TriangleMesh& mesh) {
  std::ostringstream out;
  out.precision(9);
  for (const auto& v : mesh.vertices) {
    out << "v " << v[0] << " " << v[1] << " " << v[2] << "\n";
  }
  for (const auto& t : mesh.triangles) {
    out << "f " << t[0] + 1 << " " << t[1] + 1 << " " << t[2] + 1 << "\n";
  }
  write_text(path, out.str());
}

TriangleMesh read_obj(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  TriangleMesh mesh;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    std::string head;
    ss >> head;
    if (head == "v") {
      Vec3 v;
      if (!(ss >> v[0] >> v[1] >> v[2])) {
        throw DataError(path + ": malformed vertex line");
      }
      mesh.vertices.push_back(v);
    } else if (head == "f") {
      std::array<std::uint32_t, 3> tri{};
      for (int i = 0; i < 3; ++i) {
        std::string tok;
        if (!(ss >> tok)) throw DataError(path + ": malformed face line");
        // Accept v/vt/vn forms by reading up to the first slash.
        const auto slash = tok.find('/');
        if (slash != std::string::npos) tok = tok.substr(0, slash);
        const long idx = std::strtol(tok.c_str(), nullptr, 10);
        if (idx < 1) throw DataError(path + ": face index must be >= 1");
        tri[static_cast<std::size_t>(i)] = static_cast<std::uint32_t>(idx - 1);
      }
      mesh.triangles.push_back(tri);
    }
  }
  mesh.check_indices();
  return mesh;
}

void write_manifest(const std::string& path,
                    const std::vector<ManifestRecord>& records) {
  std::ostringstream out;
  for (const auto& r : records) {
    out << r.id << "\t" << r.path << "\t" << r.dataset_tag << "\t" << r.split
        << "\n";
  }
  write_text(path, out.str());
}

std::vector<ManifestRecord> read_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  std::vector<ManifestRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    ManifestRecord rec;
    std::istringstream ss(line);
    if (!std::getline(ss, rec.id, '\t') ||
        !std::getline(ss, rec.path, '\t') ||
        !std::getline(ss, rec.dataset_tag, '\t') ||
        !std::getline(ss, rec.split)) {
      throw DataError(path + ":" + std::to_string(line_no) +
                      ": expected 4 tab-separated fields");
    }
    records.push_back(std::move(rec));
  }
  std::set<std::string> seen;
  for (const auto& rec : records) {
    if (!seen.insert(rec.id).second) {
      throw DataError(path + ": duplicate id " + rec.id);
    }
  }
  return records;
}

void write_report(const std::string& path, const MetricReport& report) {
  std::ostringstream out;
  out.precision(10);
  out << "id\tdataset_tag\tiou\tchamfer\tmse\n";
  for (const auto& r : report.rows) {
    out << r.id << "\t" << r.dataset_tag << "\t" << r.iou << "\t" << r.chamfer
        << "\t" << r.mse << "\n";
  }
  const auto& a = report.aggregates;
  out << "# chamfer = symmetric mean of squared NN distances, "
      << report.chamfer_samples << " samples per mesh\n";
  out << "# mean_iou\t" << a.mean_iou << "\n";
  out << "# mean_chamfer\t" << a.mean_chamfer << "\n";
  out << "# mean_mse\t" << a.mean_mse << "\n";
  out << "# d_iou\t" << a.d_iou << "\n";
  out << "# d_mse\t" << a.d_mse << "\n";
  write_text(path, out.str());
}

void write_text(const std::string& path, const std::string& text) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open " + tmp + " for writing");
    out.write(text.data(), static_cast<std::streamsize>(text.size()));
    if (!out) throw DataError("short write to " + tmp);
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw DataError("cannot rename " + tmp + " to " + path);
}

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace wala::io
