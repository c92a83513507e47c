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
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "wala/codec.hpp"

namespace wala {

// Cosine alpha-bar table: alpha_bar[0] = 1 exactly, strictly decreasing.
struct NoiseSchedule {
  int total_steps = 0;  // T
  std::vector<double> alpha_bar;  // T+1 entries

  double at(int t) const;
};

NoiseSchedule cosine_schedule(int total_steps);

// Conditioning vector attached to a shape: none, a point-cloud feature or a
// coarse-voxel feature.
struct Condition {
  enum class Kind { None, PointCloud, Voxel };

  Kind kind = Kind::None;
  std::vector<double> feature;

  static Condition none() { return {}; }
  bool is_none() const { return kind == Kind::None; }
};

// x0-predicting denoiser contract: given a noisy latent at step t and an
// optional condition, estimate the clean latent. A denoiser is bound to the
// schedule it was built against.
class Denoiser {
 public:
  virtual ~Denoiser() = default;

  virtual LatentGrid predict_x0(const LatentGrid& zt, int t,
                                const Condition& cond) const = 0;

  // Whether an unconditional prediction path exists (required for guidance
  // scales other than 1 on conditional models).
  virtual bool has_unconditional() const = 0;

  // Clamp range for predictions (training-latent range +-6 sigma).
  virtual double clamp_lo() const = 0;
  virtual double clamp_hi() const = 0;

  // Per-dimension posterior variance of x0 given z_t, when known in closed
  // form. Only the analytic Gaussian denoiser provides this; it lets the
  // sampler carry the exact reverse kernel for Gaussian data laws.
  virtual std::optional<double> posterior_var(int t) const {
    (void)t;
    return std::nullopt;
  }

  const NoiseSchedule& schedule() const { return schedule_; }

 protected:
  NoiseSchedule schedule_;
};

// Exact posterior mean of x0 under a known Gaussian data law N(mean, var*I).
class AnalyticGaussianDenoiser : public Denoiser {
 public:
  AnalyticGaussianDenoiser(LatentGrid mean, double variance,
                           NoiseSchedule schedule,
                           bool exact_reverse_kernel = true);

  LatentGrid predict_x0(const LatentGrid& zt, int t,
                        const Condition& cond) const override;
  bool has_unconditional() const override { return true; }
  double clamp_lo() const override;
  double clamp_hi() const override;
  std::optional<double> posterior_var(int t) const override;

  const LatentGrid& mean() const { return mean_; }
  double variance() const { return var_; }

 private:
  LatentGrid mean_;
  double var_;
  bool exact_reverse_;
};

// Per-bucket affine x0 predictor fitted by ridge regression on noised
// samples. Input row = (z_t cells, sqrt(alpha_bar_t), condition, 1).
class PerBucketLinearDenoiser : public Denoiser {
 public:
  LatentGrid predict_x0(const LatentGrid& zt, int t,
                        const Condition& cond) const override;
  bool has_unconditional() const override;
  double clamp_lo() const override { return clamp_lo_; }
  double clamp_hi() const override { return clamp_hi_; }

  int bucket_of(int t) const;
  void set_schedule(NoiseSchedule s) { schedule_ = std::move(s); }

  int side = 0;
  int dim = 0;
  int cond_dim = 0;
  double dropout_p = 0.0;
  std::vector<int> bucket_edges;      // ascending, buckets are [e_i, e_{i+1})
  std::vector<std::vector<double>> bucket_maps;  // (in+1) x out, row-major

  double clamp_lo_ = 0.0;
  double clamp_hi_ = 0.0;
};

// Geometric partition of [1, T] into `buckets` ranges.
std::vector<int> geometric_bucket_edges(int total_steps, int buckets);

// z_t = sqrt(ab_t) z0 + sqrt(1 - ab_t) eps.
LatentGrid forward_noise(const LatentGrid& z0, int t, const LatentGrid& eps,
                         const NoiseSchedule& schedule);

struct DenoiserTrainConfig {
  int buckets = 32;
  double ridge_lambda = 1e-3;
  double dropout_p = 0.1;
  int draws_per_bucket = 4;  // noised samples per pair per bucket
};

PerBucketLinearDenoiser train_denoiser(
    const std::vector<std::pair<LatentGrid, Condition>>& pairs,
    const NoiseSchedule& schedule, const DenoiserTrainConfig& config,
    std::uint64_t seed);

// Classifier-free guidance: uncond + s * (cond - uncond).
LatentGrid guided_x0(const LatentGrid& x0_uncond, const LatentGrid& x0_cond,
                     double guidance_scale);

// Coefficients of the ancestral posterior q(z_p | z_t, x0).
struct StepCoefficients {
  double coef_x0 = 0.0;
  double coef_zt = 0.0;
  double sigma = 0.0;
};

StepCoefficients ddpm_coefficients(const NoiseSchedule& schedule, int t,
                                   int t_prev);

// One ancestral step; at t_prev == 0 the output is x0_hat exactly.
LatentGrid ddpm_step(const LatentGrid& zt, const LatentGrid& x0_hat, int t,
                     int t_prev, const NoiseSchedule& schedule,
                     const LatentGrid& noise);

struct SamplerConfig {
  std::vector<int> steps;      // strictly decreasing, positive
  double guidance_scale = 1.0;
  std::uint64_t seed = 0;
  bool snap_output = false;

  void validate(int total_steps) const;
};

// Evenly spaced descending timestep list with `count` entries ending at the
// smallest positive step.
std::vector<int> make_step_list(int total_steps, int count);

// Ancestral sampling from pure noise. Deterministic for a given seed; with
// guidance_scale == 1 the unconditional path is never evaluated, so the run
// is bit-identical to pure conditional sampling.
LatentGrid sample(const Denoiser& denoiser, const Condition& cond,
                  const SamplerConfig& config, const NoiseSchedule& schedule,
                  int side, int dim, const Codebook* codebook = nullptr);

}  // namespace wala
