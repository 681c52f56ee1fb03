// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <span>
#include <vector>

#include "gruwatch/features/registry.hpp"

namespace gruwatch::likelihood {

inline constexpr double kAnomalousMedianFactor = 5.0;
inline constexpr double kAnomalousFloor = 1e-6;

struct FeatureRanking {
  /// Key columns by descending error, ties in registry order.
  std::vector<std::size_t> order;
  /// Prefix of `order` whose error exceeds the cut.
  std::vector<std::size_t> anomalous;
  double cut = 0.0;
};

/// Ranks the registry's feature-key columns by reconstruction error. The cut
/// is max(5 * median of all D errors, 1e-6). Seasonality columns take part in
/// the median but are never reported. Throws ShapeMismatch.
FeatureRanking rank_features(std::span<const double> per_feature, const features::FeatureRegistry& registry);

std::vector<features::FeatureKey> anomalous_keys(std::span<const double> per_feature,
                                                 const features::FeatureRegistry& registry);

}  // namespace gruwatch::likelihood
