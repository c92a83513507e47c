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

#include "wala/diffusion.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace wala {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kCosineOffset = 0.008;

void check_same_shape(const LatentGrid& a, const LatentGrid& b) {
  if (a.side != b.side || a.dim != b.dim) {
    throw ParameterError("latent grids must share a shape");
  }
}

}  // namespace

double NoiseSchedule::at(int t) const {
  if (t < 0 || t > total_steps) {
    throw ParameterError("timestep " + std::to_string(t) + " outside [0, T]");
  }
  return alpha_bar[static_cast<std::size_t>(t)];
}

NoiseSchedule cosine_schedule(int total_steps) {
  if (total_steps < 1) throw ParameterError("schedule needs T >= 1");
  NoiseSchedule s;
  s.total_steps = total_steps;
  s.alpha_bar.resize(static_cast<std::size_t>(total_steps) + 1);
  auto f = [&](double t) {
    const double x = (t / total_steps + kCosineOffset) / (1.0 + kCosineOffset);
    const double c = std::cos(x * kPi / 2.0);
    return c * c;
  };
  const double f0 = f(0.0);
  s.alpha_bar[0] = 1.0;
  for (int t = 1; t <= total_steps; ++t) {
    // Guard against an exactly-zero tail so ratio-based steps stay finite.
    s.alpha_bar[static_cast<std::size_t>(t)] =
        std::max(f(static_cast<double>(t)) / f0, 1e-30);
  }
  for (int t = 1; t <= total_steps; ++t) {
    if (!(s.alpha_bar[static_cast<std::size_t>(t)] <
          s.alpha_bar[static_cast<std::size_t>(t - 1)])) {
      throw FitError("cosine schedule is not strictly decreasing");
    }
  }
  return s;
}

AnalyticGaussianDenoiser::AnalyticGaussianDenoiser(LatentGrid mean,
                                                   double variance,
                                                   NoiseSchedule schedule,
                                                   bool exact_reverse_kernel)
    : mean_(std::move(mean)),
      var_(variance),
      exact_reverse_(exact_reverse_kernel) {
  if (!(var_ >= 0.0)) throw ParameterError("variance must be >= 0");
  schedule_ = std::move(schedule);
}

LatentGrid AnalyticGaussianDenoiser::predict_x0(const LatentGrid& zt, int t,
                                                const Condition& cond) const {
  (void)cond;  // law is unconditional
  check_same_shape(zt, mean_);
  const double ab = schedule_.at(t);
  const double sa = std::sqrt(ab);
  const double denom = ab * var_ + (1.0 - ab);
  LatentGrid out(zt.side, zt.dim);
  for (std::size_t i = 0; i < zt.cells.size(); ++i) {
    out.cells[i] =
        (sa * var_ * zt.cells[i] + (1.0 - ab) * mean_.cells[i]) / denom;
  }
  return out;
}

double AnalyticGaussianDenoiser::clamp_lo() const {
  double lo = mean_.cells.empty() ? 0.0 : mean_.cells[0];
  for (double m : mean_.cells) lo = std::min(lo, m);
  return lo - 6.0 * std::sqrt(var_);
}

double AnalyticGaussianDenoiser::clamp_hi() const {
  double hi = mean_.cells.empty() ? 0.0 : mean_.cells[0];
  for (double m : mean_.cells) hi = std::max(hi, m);
  return hi + 6.0 * std::sqrt(var_);
}

std::optional<double> AnalyticGaussianDenoiser::posterior_var(int t) const {
  if (!exact_reverse_) return std::nullopt;
  const double ab = schedule_.at(t);
  return var_ * (1.0 - ab) / (ab * var_ + (1.0 - ab));
}

int PerBucketLinearDenoiser::bucket_of(int t) const {
  if (t < 1 || t > schedule_.total_steps) {
    throw ParameterError("timestep outside (0, T]");
  }
  const auto it =
      std::upper_bound(bucket_edges.begin(), bucket_edges.end(), t);
  const int idx = static_cast<int>(it - bucket_edges.begin()) - 1;
  return std::clamp(idx, 0, static_cast<int>(bucket_maps.size()) - 1);
}

bool PerBucketLinearDenoiser::has_unconditional() const {
  return cond_dim == 0 || dropout_p > 0.0;
}

std::vector<int> geometric_bucket_edges(int total_steps, int buckets) {
  if (buckets < 1) throw ParameterError("need at least one bucket");
  std::vector<int> edges;
  edges.push_back(1);
  for (int i = 1; i < buckets; ++i) {
    const double frac = static_cast<double>(i) / buckets;
    int e = static_cast<int>(
        std::round(std::pow(static_cast<double>(total_steps) + 1.0, frac)));
    if (e <= edges.back()) e = edges.back() + 1;
    if (e > total_steps) break;
    edges.push_back(e);
  }
  edges.push_back(total_steps + 1);
  return edges;
}

LatentGrid forward_noise(const LatentGrid& z0, int t, const LatentGrid& eps,
                         const NoiseSchedule& schedule) {
  check_same_shape(z0, eps);
  const double ab = schedule.at(t);
  const double a = std::sqrt(ab);
  const double b = std::sqrt(1.0 - ab);
  LatentGrid zt(z0.side, z0.dim);
  for (std::size_t i = 0; i < z0.cells.size(); ++i) {
    zt.cells[i] = a * z0.cells[i] + b * eps.cells[i];
  }
  return zt;
}

namespace {

// Ridge solve (A^T A + lambda I') w = A^T B with the intercept column left
// unpenalized; Cholesky on the normal equations.
std::vector<double> ridge_solve(const std::vector<double>& rows_in,
                                const std::vector<double>& targets,
                                std::size_t n, std::size_t in_dim,
                                std::size_t out_dim, double lambda) {
  const std::size_t d = in_dim + 1;  // + intercept
  if (d > 6000) {
    throw FitError("denoiser input dimension " + std::to_string(in_dim) +
                   " exceeds the dense ridge solver limit; use a smaller "
                   "latent or condition");
  }
  std::vector<double> ata(d * d, 0.0);
  std::vector<double> atb(d * out_dim, 0.0);

  for (std::size_t r = 0; r < n; ++r) {
    const double* x = rows_in.data() + r * in_dim;
    const double* y = targets.data() + r * out_dim;
    for (std::size_t i = 0; i < d; ++i) {
      const double xi = i < in_dim ? x[i] : 1.0;
      for (std::size_t j = i; j < d; ++j) {
        const double xj = j < in_dim ? x[j] : 1.0;
        ata[i * d + j] += xi * xj;
      }
      for (std::size_t o = 0; o < out_dim; ++o) {
        atb[i * out_dim + o] += xi * y[o];
      }
    }
  }
  for (std::size_t i = 0; i < in_dim; ++i) ata[i * d + i] += lambda;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < i; ++j) ata[i * d + j] = ata[j * d + i];
  }

  // Cholesky factorization in place.
  std::vector<double>& a = ata;
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j <= i; ++j) {
      double sum = a[i * d + j];
      for (std::size_t q = 0; q < j; ++q) sum -= a[i * d + q] * a[j * d + q];
      if (i == j) {
        if (!(sum > 0.0)) {
          throw FitError(
              "singular normal equations; increase the ridge penalty");
        }
        a[i * d + i] = std::sqrt(sum);
      } else {
        a[i * d + j] = sum / a[j * d + j];
      }
    }
  }

  std::vector<double> w(d * out_dim, 0.0);
  std::vector<double> y(d);
  for (std::size_t o = 0; o < out_dim; ++o) {
    for (std::size_t i = 0; i < d; ++i) {
      double sum = atb[i * out_dim + o];
      for (std::size_t q = 0; q < i; ++q) sum -= a[i * d + q] * y[q];
      y[i] = sum / a[i * d + i];
    }
    for (std::size_t ii = d; ii-- > 0;) {
      double sum = y[ii];
      for (std::size_t q = ii + 1; q < d; ++q) {
        sum -= a[q * d + ii] * w[q * out_dim + o];
      }
      w[ii * out_dim + o] = sum / a[ii * d + ii];
    }
  }
  return w;  // (in_dim+1) x out_dim, row-major
}

}  // namespace

LatentGrid PerBucketLinearDenoiser::predict_x0(const LatentGrid& zt, int t,
                                               const Condition& cond) const {
  if (zt.side != side || zt.dim != dim) {
    throw ParameterError("latent shape does not match the trained denoiser");
  }
  const std::size_t z_dim = zt.cells.size();
  const std::size_t in_dim = z_dim + 1 + static_cast<std::size_t>(cond_dim);
  const auto& w = bucket_maps[static_cast<std::size_t>(bucket_of(t))];

  std::vector<double> x(in_dim, 0.0);
  std::copy(zt.cells.begin(), zt.cells.end(), x.begin());
  x[z_dim] = std::sqrt(schedule_.at(t));
  if (!cond.is_none()) {
    if (static_cast<int>(cond.feature.size()) != cond_dim) {
      throw ParameterError("condition dimension mismatch");
    }
    std::copy(cond.feature.begin(), cond.feature.end(),
              x.begin() + static_cast<std::ptrdiff_t>(z_dim) + 1);
  }

  LatentGrid out(side, dim);
  const std::size_t out_dim = out.cells.size();
  for (std::size_t o = 0; o < out_dim; ++o) {
    double acc = w[in_dim * out_dim + o];  // intercept row
    for (std::size_t i = 0; i < in_dim; ++i) {
      acc += x[i] * w[i * out_dim + o];
    }
    out.cells[o] = acc;
  }
  return out;
}

PerBucketLinearDenoiser train_denoiser(
    const std::vector<std::pair<LatentGrid, Condition>>& pairs,
    const NoiseSchedule& schedule, const DenoiserTrainConfig& config,
    std::uint64_t seed) {
  if (pairs.size() < 10) {
    throw ParameterError("need at least 10 training pairs");
  }
  const LatentGrid& first = pairs.front().first;
  int cond_dim = 0;
  for (const auto& [z, c] : pairs) {
    check_same_shape(z, first);
    if (!c.is_none()) {
      if (cond_dim == 0) {
        cond_dim = static_cast<int>(c.feature.size());
      } else if (cond_dim != static_cast<int>(c.feature.size())) {
        throw ParameterError("inconsistent condition dimensions");
      }
    }
  }

  PerBucketLinearDenoiser den;
  den.set_schedule(schedule);
  den.side = first.side;
  den.dim = first.dim;
  den.cond_dim = cond_dim;
  den.dropout_p = config.dropout_p;
  den.bucket_edges =
      geometric_bucket_edges(schedule.total_steps, config.buckets);

  // Clamp bounds: training-latent range +- 6 sigma.
  double mean = 0.0, sq = 0.0;
  std::size_t n_vals = 0;
  for (const auto& [z, c] : pairs) {
    for (double v : z.cells) {
      mean += v;
      sq += v * v;
      ++n_vals;
    }
  }
  mean /= static_cast<double>(n_vals);
  const double var =
      std::max(sq / static_cast<double>(n_vals) - mean * mean, 0.0);
  const double sigma = std::sqrt(var);
  den.clamp_lo_ = mean - 6.0 * sigma;
  den.clamp_hi_ = mean + 6.0 * sigma;

  const std::size_t z_dim = first.cells.size();
  const std::size_t in_dim = z_dim + 1 + static_cast<std::size_t>(cond_dim);
  const int n_buckets = static_cast<int>(den.bucket_edges.size()) - 1;

  Rng root = Rng(seed).child("denoiser");
  for (int bkt = 0; bkt < n_buckets; ++bkt) {
    const int t_lo = den.bucket_edges[static_cast<std::size_t>(bkt)];
    const int t_hi = den.bucket_edges[static_cast<std::size_t>(bkt) + 1];
    Rng brng = root.child(static_cast<std::uint64_t>(bkt));

    const std::size_t rows_n =
        pairs.size() * static_cast<std::size_t>(config.draws_per_bucket);
    std::vector<double> rows(rows_n * in_dim, 0.0);
    std::vector<double> targets(rows_n * z_dim, 0.0);

    std::size_t r = 0;
    for (const auto& [z0, c] : pairs) {
      for (int rep = 0; rep < config.draws_per_bucket; ++rep, ++r) {
        const int t =
            t_lo + static_cast<int>(brng.uniform_index(
                       static_cast<std::uint64_t>(t_hi - t_lo)));
        const double ab = schedule.at(t);
        const double sa = std::sqrt(ab);
        const double sb = std::sqrt(1.0 - ab);
        double* row = rows.data() + r * in_dim;
        for (std::size_t i = 0; i < z_dim; ++i) {
          row[i] = sa * z0.cells[i] + sb * brng.normal();
        }
        row[z_dim] = sa;
        const bool drop = cond_dim > 0 &&
                          (c.is_none() || brng.uniform() < config.dropout_p);
        if (cond_dim > 0 && !drop && !c.is_none()) {
          std::copy(c.feature.begin(), c.feature.end(),
                    row + static_cast<std::ptrdiff_t>(z_dim) + 1);
        }
        std::copy(z0.cells.begin(), z0.cells.end(),
                  targets.begin() + static_cast<std::ptrdiff_t>(r * z_dim));
      }
    }
    den.bucket_maps.push_back(ridge_solve(rows, targets, rows_n, in_dim, z_dim,
                                          config.ridge_lambda));
  }
  return den;
}

LatentGrid guided_x0(const LatentGrid& x0_uncond, const LatentGrid& x0_cond,
                     double guidance_scale) {
  check_same_shape(x0_uncond, x0_cond);
  LatentGrid out(x0_uncond.side, x0_uncond.dim);
  for (std::size_t i = 0; i < out.cells.size(); ++i) {
    out.cells[i] = x0_uncond.cells[i] +
                   guidance_scale * (x0_cond.cells[i] - x0_uncond.cells[i]);
  }
  return out;
}

StepCoefficients ddpm_coefficients(const NoiseSchedule& schedule, int t,
                                   int t_prev) {
  if (t <= t_prev || t_prev < 0) {
    throw ParameterError("ddpm step requires t > t_prev >= 0");
  }
  const double ab_t = schedule.at(t);
  const double ab_p = schedule.at(t_prev);
  const double alpha = ab_t / ab_p;
  const double beta = 1.0 - alpha;
  const double om_t = 1.0 - ab_t;
  const double om_p = 1.0 - ab_p;

  StepCoefficients c;
  if (t_prev == 0) {
    c.coef_x0 = 1.0;
    c.coef_zt = 0.0;
    c.sigma = 0.0;
    return c;
  }
  c.coef_x0 = std::sqrt(ab_p) * beta / om_t;
  c.coef_zt = std::sqrt(alpha) * om_p / om_t;
  c.sigma = std::sqrt(std::max(om_p / om_t * beta, 0.0));
  return c;
}

LatentGrid ddpm_step(const LatentGrid& zt, const LatentGrid& x0_hat, int t,
                     int t_prev, const NoiseSchedule& schedule,
                     const LatentGrid& noise) {
  check_same_shape(zt, x0_hat);
  check_same_shape(zt, noise);
  const StepCoefficients c = ddpm_coefficients(schedule, t, t_prev);
  LatentGrid out(zt.side, zt.dim);
  for (std::size_t i = 0; i < out.cells.size(); ++i) {
    out.cells[i] = c.coef_x0 * x0_hat.cells[i] + c.coef_zt * zt.cells[i] +
                   c.sigma * noise.cells[i];
  }
  return out;
}

void SamplerConfig::validate(int total_steps) const {
  if (steps.empty()) throw ParameterError("sampler needs at least one step");
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (steps[i] < 1 || steps[i] > total_steps) {
      throw ParameterError("sampler step outside (0, T]");
    }
    if (i > 0 && steps[i] >= steps[i - 1]) {
      throw ParameterError("sampler steps must be strictly decreasing");
    }
  }
  if (!(guidance_scale >= 0.0)) {
    throw ParameterError("guidance scale must be >= 0");
  }
}

std::vector<int> make_step_list(int total_steps, int count) {
  if (count < 1 || count > total_steps) {
    throw ParameterError("step count must lie in [1, T]");
  }
  std::vector<int> steps;
  for (int i = 0; i < count; ++i) {
    int t = static_cast<int>(std::llround(
        static_cast<double>(total_steps) * (count - i) / count));
    t = std::clamp(t, 1, total_steps);
    if (!steps.empty() && t >= steps.back()) continue;
    steps.push_back(t);
  }
  if (steps.empty()) steps.push_back(total_steps);
  return steps;
}

LatentGrid sample(const Denoiser& denoiser, const Condition& cond,
                  const SamplerConfig& config, const NoiseSchedule& schedule,
                  int side, int dim, const Codebook* codebook) {
  config.validate(schedule.total_steps);
  const bool guided = config.guidance_scale != 1.0 && !cond.is_none();
  if (guided && !denoiser.has_unconditional()) {
    throw ConfigError(
        "guidance needs a denoiser trained with condition dropout");
  }

  Rng rng = Rng(config.seed).child("sampler");
  LatentGrid z(side, dim);
  for (auto& c : z.cells) c = rng.normal();

  const double lo = denoiser.clamp_lo();
  const double hi = denoiser.clamp_hi();
  const Condition none = Condition::none();

  for (std::size_t i = 0; i < config.steps.size(); ++i) {
    const int t = config.steps[i];
    const int t_prev = i + 1 < config.steps.size() ? config.steps[i + 1] : 0;

    LatentGrid x0 = denoiser.predict_x0(z, t, cond);
    if (guided) {
      const LatentGrid x0_uncond = denoiser.predict_x0(z, t, none);
      x0 = guided_x0(x0_uncond, x0, config.guidance_scale);
    }
    for (auto& c : x0.cells) c = std::clamp(c, lo, hi);

    LatentGrid noise(side, dim);
    if (t_prev > 0) {
      for (auto& c : noise.cells) c = rng.normal();
    }
    LatentGrid next = ddpm_step(z, x0, t, t_prev, schedule, noise);

    // Exact reverse kernel when the denoiser knows its posterior variance:
    // the ancestral mean is already exact and the missing spread is
    // coef_x0^2 * Var[x0 | z_t].
    const auto pvar = denoiser.posterior_var(t);
    if (pvar.has_value() && *pvar > 0.0) {
      const StepCoefficients c = ddpm_coefficients(schedule, t, t_prev);
      const double extra = c.coef_x0 * std::sqrt(*pvar);
      if (extra > 0.0) {
        for (auto& cell : next.cells) cell += extra * rng.normal();
      }
    }
    z = std::move(next);
  }

  if (config.snap_output) {
    if (codebook == nullptr) {
      throw ConfigError("snap requested without a codebook");
    }
    z = snap(z, *codebook);
  }
  return z;
}

}  // namespace wala
