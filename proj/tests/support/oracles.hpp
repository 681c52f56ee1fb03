// SPDX-License-Identifier: Apache-2.0
// Independent reference computations used by the unit and acceptance tests.
// Everything here is written the slow, obvious way in long double so it
// shares no code path with the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

#include "gruwatch/model/gru_autoencoder.hpp"

namespace testsupport {

struct OracleSummary {
  long double min = 0, max = 0, count = 0, median = 0, mean = 0, std = 0, skewness = 0;
};

inline OracleSummary brute_force_summary(std::vector<double> xs) {
  OracleSummary s;
  const std::size_t n = xs.size();
  if (n == 0) return s;
  std::sort(xs.begin(), xs.end());
  s.count = static_cast<long double>(n);
  s.min = xs.front();
  s.max = xs.back();
  s.median = n % 2 == 1 ? static_cast<long double>(xs[n / 2])
                        : (static_cast<long double>(xs[n / 2 - 1]) + xs[n / 2]) / 2.0L;
  long double sum = 0;
  for (double x : xs) sum += x;
  s.mean = sum / n;
  long double m2 = 0, m3 = 0;
  for (double x : xs) {
    const long double d = x - s.mean;
    m2 += d * d;
    m3 += d * d * d;
  }
  if (n >= 2) s.std = std::sqrt(m2 / (n - 1));
  m2 /= n;
  m3 /= n;
  if (n >= 3 && m2 > 0) {
    const long double g1 = m3 / std::pow(m2, 1.5L);
    s.skewness = std::sqrt(static_cast<long double>(n) * (n - 1)) / (n - 2) * g1;
  }
  if (xs.front() == xs.back()) {
    s.std = 0;
    s.skewness = 0;
  }
  return s;
}

struct OracleReconstruction {
  std::vector<double> perFeature;
  double mse = 0;
};

inline OracleReconstruction brute_force_reconstruction_error(const std::vector<double>& s,
                                                             const std::vector<double>& r,
                                                             std::size_t rows, std::size_t cols) {
  OracleReconstruction out;
  out.perFeature.assign(cols, 0.0);
  long double total = 0;
  for (std::size_t d = 0; d < cols; ++d) {
    long double acc = 0;
    for (std::size_t t = 0; t < rows; ++t) {
      const long double diff = static_cast<long double>(s[t * cols + d]) - r[t * cols + d];
      acc += diff * diff;
    }
    out.perFeature[d] = static_cast<double>(acc / rows);
    total += acc / rows;
  }
  out.mse = static_cast<double>(total / cols);
  return out;
}

/// Central differences of the forward-pass MSE for every parameter.
inline std::vector<double> finite_difference_gradient(const gruwatch::model::GruAutoencoder& model,
                                                      const gruwatch::model::Matrix& sample,
                                                      double step) {
  gruwatch::model::GruAutoencoder probe = model;
  auto params = probe.parameters();
  std::vector<double> grad(params.size());
  auto loss = [&] {
    auto recon = probe.forward(sample);
    long double acc = 0;
    for (std::size_t i = 0; i < recon.data.size(); ++i) {
      const long double d = static_cast<long double>(sample.data[i]) - recon.data[i];
      acc += d * d;
    }
    return acc / recon.data.size();
  };
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + step;
    const long double up = loss();
    params[i] = saved - step;
    const long double down = loss();
    params[i] = saved;
    grad[i] = static_cast<double>((up - down) / (2.0L * step));
  }
  return grad;
}

/// |a - b| / max(|a|, |b|), with the denominator floored at 1e-6 so that
/// gradients that are zero up to rounding do not divide by noise.
inline double relative_error(double a, double b) {
  const double denom = std::max({std::fabs(a), std::fabs(b), 1e-6});
  return std::fabs(a - b) / denom;
}

/// Likelihood after `history` (already including the newest error) under the
/// insert-then-score rule with population standard deviation.
inline double brute_force_likelihood(const std::vector<double>& history, std::size_t window,
                                     std::size_t short_window, double sigma_floor = 1e-9) {
  if (history.size() < short_window) return 0.5;
  const std::size_t n = std::min(window, history.size());
  const std::size_t first = history.size() - n;
  long double sum = 0;
  for (std::size_t i = first; i < history.size(); ++i) sum += history[i];
  const long double mean = sum / n;
  long double var = 0;
  for (std::size_t i = first; i < history.size(); ++i) {
    const long double d = history[i] - mean;
    var += d * d;
  }
  const long double sigma = std::max<long double>(std::sqrt(var / n), sigma_floor);
  long double recent = 0;
  for (std::size_t i = history.size() - short_window; i < history.size(); ++i) recent += history[i];
  recent /= short_window;
  const long double z = (recent - mean) / sigma;
  return static_cast<double>(1.0L - 0.5L * std::erfc(z / std::sqrt(2.0L)));
}

/// Column indices (among the first `key_columns`) whose error exceeds
/// max(5 * median over all columns, 1e-6), by descending error then index.
inline std::vector<std::size_t> brute_force_anomalous(const std::vector<double>& errors,
                                                      std::size_t key_columns) {
  std::vector<double> sorted = errors;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t n = sorted.size();
  const double median = n % 2 == 1 ? sorted[n / 2] : (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0;
  const double cut = std::max(5.0 * median, 1e-6);
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < key_columns; ++i) {
    if (errors[i] > cut) out.push_back(i);
  }
  // insertion sort: obviously stable
  for (std::size_t i = 1; i < out.size(); ++i) {
    for (std::size_t j = i; j > 0 && errors[out[j]] > errors[out[j - 1]]; --j) std::swap(out[j], out[j - 1]);
  }
  return out;
}

}  // namespace testsupport
