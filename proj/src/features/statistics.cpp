// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/features/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace gruwatch::features {

SummaryStatistics summarize(std::span<const double> values, const simd::KernelTable& k) {
  SummaryStatistics s;
  const std::size_t n = values.size();
  if (n == 0) return s;

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  s.count = static_cast<double>(n);
  s.min = sorted.front();
  s.max = sorted.back();
  s.median = (n % 2 == 1) ? sorted[n / 2] : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);

  if (s.min == s.max) {
    s.mean = s.min;
    return s;
  }

  // Two passes: the mean, then central moments about it.
  const double mean = k.sum(sorted.data(), n) / s.count;
  double sum_sq = 0.0;
  double sum_cube = 0.0;
  k.central_moments(sorted.data(), n, mean, &sum_sq, &sum_cube);
  s.mean = mean;

  if (n >= 2) s.std = std::sqrt(sum_sq / (s.count - 1.0));
  if (n >= 3 && sum_sq > 0.0) {
    const double m2 = sum_sq / s.count;
    const double m3 = sum_cube / s.count;
    const double g1 = m3 / std::pow(m2, 1.5);
    s.skewness = g1 * std::sqrt(s.count * (s.count - 1.0)) / (s.count - 2.0);
  }
  return s;
}

}  // namespace gruwatch::features
