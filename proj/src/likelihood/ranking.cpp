// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/likelihood/ranking.hpp"

#include <algorithm>
#include <numeric>

#include "gruwatch/error.hpp"

namespace gruwatch::likelihood {

namespace {

double median_of(std::span<const double> xs) {
  std::vector<double> v(xs.begin(), xs.end());
  const std::size_t n = v.size();
  if (n == 0) return 0.0;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2), v.end());
  const double upper = v[n / 2];
  if (n % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(n / 2));
  return (lower + upper) / 2.0;
}

}  // namespace

FeatureRanking rank_features(std::span<const double> per_feature, const features::FeatureRegistry& registry) {
  if (per_feature.size() != registry.column_count()) {
    throw Error(ErrorCode::ShapeMismatch, "per-feature errors do not match the registry width");
  }
  FeatureRanking out;
  out.cut = std::max(kAnomalousMedianFactor * median_of(per_feature), kAnomalousFloor);
  out.order.resize(registry.key_count());
  std::iota(out.order.begin(), out.order.end(), std::size_t{0});
  std::stable_sort(out.order.begin(), out.order.end(),
                   [&](std::size_t a, std::size_t b) { return per_feature[a] > per_feature[b]; });
  for (std::size_t col : out.order) {
    if (!(per_feature[col] > out.cut)) break;
    out.anomalous.push_back(col);
  }
  return out;
}

std::vector<features::FeatureKey> anomalous_keys(std::span<const double> per_feature,
                                                 const features::FeatureRegistry& registry) {
  std::vector<features::FeatureKey> keys;
  for (std::size_t col : rank_features(per_feature, registry).anomalous) keys.push_back(registry.keys()[col]);
  return keys;
}

}  // namespace gruwatch::likelihood
