#include <doctest.h>

#include <cmath>

#include "support/stats.hpp"
#include "wala/diffusion.hpp"

using namespace wala;

TEST_SUITE_BEGIN("diffusion");

TEST_CASE("cosine schedule endpoints and monotonicity") {
  for (int t_total : {1, 10, 1000}) {
    const NoiseSchedule s = cosine_schedule(t_total);
    CHECK(s.alpha_bar[0] == 1.0);
    for (int t = 1; t <= t_total; ++t) {
      CHECK(s.at(t) < s.at(t - 1));
      CHECK(s.at(t) > 0.0);
    }
  }
  const NoiseSchedule s = cosine_schedule(1000);
  CHECK(s.at(1000) < 1e-3);
  CHECK_THROWS_AS(cosine_schedule(0), ParameterError);
}

TEST_CASE("cosine schedule matches an independent evaluation at t=500") {
  const NoiseSchedule s = cosine_schedule(1000);
  // Recomputed with long doubles, straight from the cosine rule.
  const long double offset = 0.008L;
  auto f = [&](long double t) {
    const long double x = (t / 1000.0L + offset) / (1.0L + offset);
    const long double c = std::cos(x * 1.57079632679489661923L);
    return c * c;
  };
  const double expected = static_cast<double>(f(500.0L) / f(0.0L));
  CHECK(s.at(500) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("forward noising endpoints") {
  const NoiseSchedule s = cosine_schedule(100);
  LatentGrid z0(2, 2);
  Rng rng(1);
  for (auto& v : z0.cells) v = rng.normal();
  LatentGrid eps(2, 2);
  for (auto& v : eps.cells) v = rng.normal();

  const LatentGrid at0 = forward_noise(z0, 0, eps, s);
  CHECK(at0.cells == z0.cells);

  LatentGrid zero_eps(2, 2);
  const LatentGrid scaled = forward_noise(z0, 60, zero_eps, s);
  const double a = std::sqrt(s.at(60));
  for (std::size_t i = 0; i < z0.cells.size(); ++i) {
    CHECK(scaled.cells[i] == doctest::Approx(a * z0.cells[i]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(forward_noise(z0, 101, eps, s), ParameterError);
}

TEST_CASE("forward noising at T preserves unit variance") {
  const NoiseSchedule s = cosine_schedule(1000);
  Rng rng(7);
  double sq = 0.0;
  const std::size_t n = 100000;
  LatentGrid z0(1, 1), eps(1, 1);
  for (std::size_t i = 0; i < n; ++i) {
    z0.cells[0] = rng.normal();
    eps.cells[0] = rng.normal();
    const double zt = forward_noise(z0, 1000, eps, s).cells[0];
    sq += zt * zt;
  }
  CHECK(std::abs(sq / static_cast<double>(n) - 1.0) < 0.05);
}

TEST_CASE("bucket edges partition [1, T]") {
  const auto edges = geometric_bucket_edges(1000, 32);
  CHECK(edges.front() == 1);
  CHECK(edges.back() == 1001);
  for (std::size_t i = 1; i < edges.size(); ++i) CHECK(edges[i] > edges[i - 1]);
}

TEST_CASE("denoiser training: constant target is learned exactly") {
  const NoiseSchedule s = cosine_schedule(200);
  LatentGrid z0(1, 3);
  z0.cells = {0.4, -1.1, 2.0};
  std::vector<std::pair<LatentGrid, Condition>> pairs(
      12, {z0, Condition::none()});
  DenoiserTrainConfig cfg;
  cfg.buckets = 8;
  cfg.ridge_lambda = 1e-6;
  const PerBucketLinearDenoiser den = train_denoiser(pairs, s, cfg, 3);

  Rng rng(4);
  for (int t : {1, 50, 150, 200}) {
    LatentGrid zt(1, 3);
    for (auto& v : zt.cells) v = rng.normal();
    const LatentGrid x0 = den.predict_x0(zt, t, Condition::none());
    for (int c = 0; c < 3; ++c) {
      CHECK(std::abs(x0.cells[static_cast<std::size_t>(c)] -
                     z0.cells[static_cast<std::size_t>(c)]) < 1e-3);
    }
  }
}

TEST_CASE("huge ridge penalty collapses to the per-bucket mean") {
  const NoiseSchedule s = cosine_schedule(100);
  Rng rng(5);
  std::vector<std::pair<LatentGrid, Condition>> pairs;
  double mean = 0.0;
  for (int i = 0; i < 20; ++i) {
    LatentGrid z(1, 1);
    z.cells[0] = rng.uniform(-1.0, 1.0);
    mean += z.cells[0] / 20.0;
    pairs.emplace_back(std::move(z), Condition::none());
  }
  DenoiserTrainConfig cfg;
  cfg.buckets = 4;
  cfg.ridge_lambda = 1e12;
  const PerBucketLinearDenoiser den = train_denoiser(pairs, s, cfg, 1);
  LatentGrid zt(1, 1);
  zt.cells[0] = 3.0;
  const LatentGrid x0 = den.predict_x0(zt, 50, Condition::none());
  CHECK(x0.cells[0] == doctest::Approx(mean).epsilon(1e-3));
}

TEST_CASE("at deep noise the prediction approaches the prior mean") {
  const NoiseSchedule s = cosine_schedule(1000);
  Rng rng(6);
  const double mu = 1.5;
  std::vector<std::pair<LatentGrid, Condition>> pairs;
  for (int i = 0; i < 400; ++i) {
    LatentGrid z(1, 1);
    z.cells[0] = mu + 0.3 * rng.normal();
    pairs.emplace_back(std::move(z), Condition::none());
  }
  DenoiserTrainConfig cfg;
  cfg.buckets = 16;
  cfg.ridge_lambda = 1e-3;
  cfg.draws_per_bucket = 8;
  const PerBucketLinearDenoiser den = train_denoiser(pairs, s, cfg, 2);

  LatentGrid zt(1, 1);
  zt.cells[0] = rng.normal();  // nearly pure noise at t = 1000
  const LatentGrid x0 = den.predict_x0(zt, 1000, Condition::none());
  CHECK(std::abs(x0.cells[0] - mu) / mu < 0.02);
}

TEST_CASE("guidance endpoints and extrapolation") {
  LatentGrid u(1, 2), c(1, 2);
  u.cells = {1.0, -2.0};
  c.cells = {3.0, 0.5};
  CHECK(guided_x0(u, c, 1.0).cells == c.cells);
  CHECK(guided_x0(u, c, 0.0).cells == u.cells);
  const LatentGrid g = guided_x0(u, c, 1.5);
  for (std::size_t i = 0; i < 2; ++i) {
    CHECK(g.cells[i] ==
          doctest::Approx(u.cells[i] + 1.5 * (c.cells[i] - u.cells[i])));
  }
}

TEST_CASE("ddpm step at t_prev=0 returns x0 exactly") {
  const NoiseSchedule s = cosine_schedule(100);
  LatentGrid zt(1, 2), x0(1, 2), noise(1, 2);
  zt.cells = {0.3, -0.4};
  x0.cells = {1.0, 2.0};
  noise.cells = {5.0, -5.0};  // must be ignored
  const LatentGrid out = ddpm_step(zt, x0, 40, 0, s, noise);
  CHECK(out.cells == x0.cells);
  CHECK_THROWS_AS(ddpm_step(zt, x0, 10, 10, s, noise), ParameterError);
}

TEST_CASE("degenerate step with equal alpha-bars is a no-op") {
  NoiseSchedule s;
  s.total_steps = 2;
  s.alpha_bar = {1.0, 0.5, 0.5};
  LatentGrid zt(1, 1), noise(1, 1);
  zt.cells = {0.75};
  noise.cells = {9.0};
  const LatentGrid out = ddpm_step(zt, zt, 2, 1, s, noise);
  CHECK(out.cells[0] == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("ddpm step matches the closed-form posterior moments") {
  const NoiseSchedule s = cosine_schedule(1000);
  const int t = 600, p = 350;
  const StepCoefficients c = ddpm_coefficients(s, t, p);

  LatentGrid zt(1, 1), x0(1, 1), noise(1, 1);
  zt.cells = {0.8};
  x0.cells = {-0.2};
  Rng rng(11);
  const std::size_t n = 100000;
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    noise.cells[0] = rng.normal();
    const double v = ddpm_step(zt, x0, t, p, s, noise).cells[0];
    sum += v;
    sq += v * v;
  }
  const double mean = sum / static_cast<double>(n);
  const double var = sq / static_cast<double>(n) - mean * mean;
  const double expect_mean = c.coef_x0 * x0.cells[0] + c.coef_zt * zt.cells[0];
  const double expect_var = c.sigma * c.sigma;
  // 3-sigma Monte Carlo bands.
  CHECK(std::abs(mean - expect_mean) <
        3.0 * c.sigma / std::sqrt(static_cast<double>(n)));
  CHECK(std::abs(var - expect_var) <
        3.0 * expect_var * std::sqrt(2.0 / static_cast<double>(n)));
}

TEST_CASE("step lists are strictly decreasing and end at the smallest step") {
  CHECK(make_step_list(1000, 5) == std::vector<int>{1000, 800, 600, 400, 200});
  const auto full = make_step_list(1000, 1000);
  CHECK(full.size() == 1000);
  CHECK(full.front() == 1000);
  CHECK(full.back() == 1);
  CHECK_THROWS_AS(make_step_list(1000, 0), ParameterError);
}

TEST_CASE("sampler: analytic gaussian law is reproduced") {
  const NoiseSchedule s = cosine_schedule(1000);
  const double mu = 0.7, sigma2 = 0.25;
  LatentGrid mean(1, 2);
  mean.cells = {mu, mu};
  const AnalyticGaussianDenoiser den(mean, sigma2, s);

  SamplerConfig cfg;
  cfg.steps = make_step_list(1000, 1000);
  cfg.seed = 33;

  const std::size_t n = 10000;
  double sum = 0.0, sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    SamplerConfig c2 = cfg;
    c2.seed = 1000 + i;
    const LatentGrid z = sample(den, Condition::none(), c2, s, 1, 2);
    for (double v : z.cells) {
      sum += v;
      sq += v * v;
    }
  }
  const double m = sum / static_cast<double>(2 * n);
  const double var = sq / static_cast<double>(2 * n) - m * m;
  CHECK(std::abs(m - mu) < 0.05);
  CHECK(std::abs(var - sigma2) / sigma2 < 0.10);
}

TEST_CASE("plain-kernel sampling still matches moments at 1000 steps") {
  const NoiseSchedule s = cosine_schedule(1000);
  LatentGrid mean(1, 1);
  mean.cells = {0.0};
  const AnalyticGaussianDenoiser den(mean, 1.0, s, /*exact_reverse=*/false);

  SamplerConfig cfg;
  cfg.steps = make_step_list(1000, 1000);
  const std::size_t n = 4000;
  double sq = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    SamplerConfig c2 = cfg;
    c2.seed = 50000 + i;
    sq += std::pow(sample(den, Condition::none(), c2, s, 1, 1).cells[0], 2);
  }
  CHECK(std::abs(sq / static_cast<double>(n) - 1.0) < 0.10);
}

TEST_CASE("step-count monotonicity of the plain ancestral sampler") {
  const NoiseSchedule s = cosine_schedule(1000);
  LatentGrid mean(1, 1);
  mean.cells = {0.0};
  const AnalyticGaussianDenoiser den(mean, 1.0, s, /*exact_reverse=*/false);

  auto draw = [&](int steps, std::uint64_t base) {
    std::vector<double> out;
    for (std::size_t i = 0; i < 3000; ++i) {
      SamplerConfig cfg;
      cfg.steps = make_step_list(1000, steps);
      cfg.seed = base + i;
      out.push_back(sample(den, Condition::none(), cfg, s, 1, 1).cells[0]);
    }
    return out;
  };
  Rng rng(77);
  std::vector<double> truth;
  for (int i = 0; i < 3000; ++i) truth.push_back(rng.normal());

  const double err_fine = teststats::energy_distance_1d(draw(1000, 1), truth);
  const double err_coarse = teststats::energy_distance_1d(draw(5, 2), truth);
  CHECK(err_fine <= err_coarse);
}

TEST_CASE("identical seeds give bit-identical samples") {
  const NoiseSchedule s = cosine_schedule(500);
  LatentGrid mean(2, 3);
  for (auto& v : mean.cells) v = 0.1;
  const AnalyticGaussianDenoiser den(mean, 0.5, s);
  SamplerConfig cfg;
  cfg.steps = make_step_list(500, 10);
  cfg.seed = 999;
  const LatentGrid a = sample(den, Condition::none(), cfg, s, 2, 3);
  const LatentGrid b = sample(den, Condition::none(), cfg, s, 2, 3);
  CHECK(a.cells == b.cells);
}

TEST_CASE("guidance scale 1 is bit-identical to the conditional-only path") {
  const NoiseSchedule s = cosine_schedule(200);
  Rng rng(8);
  std::vector<std::pair<LatentGrid, Condition>> pairs;
  for (int i = 0; i < 30; ++i) {
    LatentGrid z(1, 2);
    for (auto& v : z.cells) v = rng.normal();
    Condition c;
    c.kind = Condition::Kind::PointCloud;
    c.feature = {rng.normal(), rng.normal(), rng.normal()};
    pairs.emplace_back(std::move(z), std::move(c));
  }
  DenoiserTrainConfig tc;
  tc.buckets = 8;
  tc.dropout_p = 0.2;
  const PerBucketLinearDenoiser den = train_denoiser(pairs, s, tc, 10);

  Condition cond = pairs[0].second;
  SamplerConfig cfg;
  cfg.steps = make_step_list(200, 8);
  cfg.seed = 5;
  cfg.guidance_scale = 1.0;
  const LatentGrid guided = sample(den, cond, cfg, s, 1, 2);

  // Manual conditional-only rollout with the same randomness.
  Rng mrng = Rng(cfg.seed).child("sampler");
  LatentGrid z(1, 2);
  for (auto& v : z.cells) v = mrng.normal();
  for (std::size_t i = 0; i < cfg.steps.size(); ++i) {
    const int t = cfg.steps[i];
    const int tp = i + 1 < cfg.steps.size() ? cfg.steps[i + 1] : 0;
    LatentGrid x0 = den.predict_x0(z, t, cond);
    for (auto& v : x0.cells) {
      v = std::clamp(v, den.clamp_lo(), den.clamp_hi());
    }
    LatentGrid noise(1, 2);
    if (tp > 0) {
      for (auto& v : noise.cells) v = mrng.normal();
    }
    z = ddpm_step(z, x0, t, tp, s, noise);
  }
  CHECK(guided.cells == z.cells);
}

TEST_CASE("guidance without an unconditional path is a config error") {
  const NoiseSchedule s = cosine_schedule(100);
  Rng rng(3);
  std::vector<std::pair<LatentGrid, Condition>> pairs;
  for (int i = 0; i < 15; ++i) {
    LatentGrid z(1, 1);
    z.cells[0] = rng.normal();
    Condition c;
    c.kind = Condition::Kind::Voxel;
    c.feature = {rng.normal(), rng.normal()};
    pairs.emplace_back(std::move(z), std::move(c));
  }
  DenoiserTrainConfig tc;
  tc.buckets = 4;
  tc.dropout_p = 0.0;  // no unconditional rows
  const PerBucketLinearDenoiser den = train_denoiser(pairs, s, tc, 1);

  SamplerConfig cfg;
  cfg.steps = make_step_list(100, 5);
  cfg.guidance_scale = 1.5;
  CHECK_THROWS_AS(sample(den, pairs[0].second, cfg, s, 1, 1), ConfigError);
}

TEST_SUITE_END();
