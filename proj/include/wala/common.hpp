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
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace wala {

// Error taxonomy. The CLI maps these onto process exit codes:
// parameter/usage -> 1, data/geometry -> 2, fit/numeric -> 3.
class ParameterError : public std::runtime_error {
 public:
  explicit ParameterError(const std::string& msg) : std::runtime_error(msg) {}
};

class GeometryError : public std::runtime_error {
 public:
  explicit GeometryError(const std::string& msg) : std::runtime_error(msg) {}
};

class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

class FitError : public std::runtime_error {
 public:
  explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Counter-based deterministic RNG (xoshiro256** seeded via splitmix64).
// All randomness in the library flows through this type so that results are
// bit-identical across platforms and thread schedules. Sub-streams are derived
// by label so that one root seed reproduces an entire pipeline run.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53 bits of precision.
  double uniform();

  // Uniform in [lo, hi).
  double uniform(double lo, double hi);

  // Uniform integer in [0, n). n must be > 0.
  std::uint64_t uniform_index(std::uint64_t n);

  // Standard normal via Box-Muller (deterministic, no cached spare).
  double normal();

  // Derived independent stream for a named stage.
  Rng child(std::string_view label) const;

  // Derived stream for a numbered item within a stage.
  Rng child(std::uint64_t index) const;

 private:
  std::uint64_t s_[4];
};

// Stable 64-bit hash used for seed derivation (FNV-1a over bytes).
std::uint64_t hash_label(std::string_view label);

// Number of worker threads. Reads WALA_THREADS once (0 or unset = all cores).
int worker_threads();

// Runs fn(begin, end) over [0, n) in fixed-size chunks. Chunk boundaries do
// not depend on the thread count, so any reduction keyed by chunk index is
// bit-identical for every WALA_THREADS setting.
void parallel_chunks(std::size_t n, std::size_t chunk,
                     const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace wala
