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

#include <string>
#include <vector>

#include "wala/codec.hpp"
#include "wala/dataset.hpp"
#include "wala/diffusion.hpp"
#include "wala/metrics.hpp"

namespace wala::io {

// All binary formats are little-endian. Writes are atomic
// (write-temp-then-rename).

// "SDF1": u32 N, f32 origin[3], f32 spacing, f32 truncation, N^3 f32 values
// x-fastest.
void write_sdf(const std::string& path, const SdfGrid& grid);
SdfGrid read_sdf(const std::string& path);

// "WTR1": u32 side M, u32 channels (=64), f32 data channel-major then
// x-fastest. Grid provenance travels via CLI flags, not the file.
void write_tree(const std::string& path, const DiffusibleTree& tree);
DiffusibleTree read_tree(const std::string& path);

// "WDC1": full decomposition container including grid spec, family, boundary
// and level sizes (an internal intermediate between dwt and pack).
void write_decomposition(const std::string& path,
                         const WaveletDecomposition& decomp);
WaveletDecomposition read_decomposition(const std::string& path);

// "LC01": u32 b, u32 d, f32 enc row-major, f32 dec row-major.
void write_codec(const std::string& path, const LinearCodec& codec);
LinearCodec read_codec(const std::string& path);

// "CB01": u32 K, u32 d, f32 entries row-major.
void write_codebook(const std::string& path, const Codebook& book);
Codebook read_codebook(const std::string& path);

// "LAT1": u32 S, u32 d, f32 cells (cell-major).
void write_latent(const std::string& path, const LatentGrid& latent);
LatentGrid read_latent(const std::string& path);

// "CND1": u32 variant (0 none, 1 point cloud, 2 voxel), u32 dim, f32 data.
void write_condition(const std::string& path, const Condition& cond);
Condition read_condition(const std::string& path);

// "DN01": bucket edges and per-bucket affine maps plus shape metadata.
void write_denoiser(const std::string& path, const PerBucketLinearDenoiser& d);
PerBucketLinearDenoiser read_denoiser(const std::string& path);

// ASCII OBJ, v/f lines only, 1-based indices.
void write_obj(const std::string& path, const TriangleMesh& mesh);
TriangleMesh read_obj(const std::string& path);

// Manifest: one record per line, tab-separated id/path/tag/split.
void write_manifest(const std::string& path,
                    const std::vector<ManifestRecord>& records);
std::vector<ManifestRecord> read_manifest(const std::string& path);

// Metric report: TSV with a header row; aggregates appended as '#' comment
// lines (including the Chamfer convention note).
void write_report(const std::string& path, const MetricReport& report);

void write_text(const std::string& path, const std::string& text);
std::string read_text(const std::string& path);

}  // namespace wala::io
