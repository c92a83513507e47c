// Test-side statistics helpers (independent of the library internals).
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace teststats {

// Sum of |x_i - y_j| over all pairs, via sorting and prefix sums.
inline double abs_diff_pair_sum(std::vector<double> x, std::vector<double> y) {
  std::sort(x.begin(), x.end());
  std::vector<double> prefix(x.size() + 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) prefix[i + 1] = prefix[i] + x[i];
  double total = 0.0;
  for (double v : y) {
    const std::size_t k = static_cast<std::size_t>(
        std::upper_bound(x.begin(), x.end(), v) - x.begin());
    total += (static_cast<double>(k) * v - prefix[k]) +
             ((prefix[x.size()] - prefix[k]) -
              static_cast<double>(x.size() - k) * v);
  }
  return total;
}

// Two-sample energy distance for scalars: 2 E|X-Y| - E|X-X'| - E|Y-Y'|.
inline double energy_distance_1d(const std::vector<double>& x,
                                 const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  const double a = abs_diff_pair_sum(x, y) / (n * m);
  const double b = abs_diff_pair_sum(x, x) / (n * n);
  const double c = abs_diff_pair_sum(y, y) / (m * m);
  return 2.0 * a - b - c;
}

inline double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

inline double variance(const std::vector<double>& v) {
  const double mu = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - mu) * (x - mu);
  return s / static_cast<double>(v.size());
}

}  // namespace teststats
