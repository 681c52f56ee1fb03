// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "gruwatch/features/registry.hpp"
#include "gruwatch/features/window.hpp"

namespace gruwatch::features {

enum class PredictionPolicy { Predict, PredictWithWarning, SkipWithWarning };

std::string_view to_string(PredictionPolicy p) noexcept;
/// Throws InvalidConfig for an unknown name.
PredictionPolicy policy_from_string(std::string_view s);

struct FeatureVector {
  std::int64_t windowStart = 0;
  std::int64_t registryVersion = 0;
  std::vector<double> values;  // normalized, registry column order
  std::vector<FeatureKey> unseenKeys;
  PredictionPolicy policy = PredictionPolicy::Predict;
};

struct MissingDataPolicy {
  /// Consecutive empty windows (including the current one) that suppress a
  /// prediction.
  std::size_t skipAfterEmptyWindows = 4;
};

/// Dense raw (un-normalized) row: registry keys zero-filled, then seasonality.
std::vector<double> raw_row(const AggregationWindow& agg, const FeatureRegistry& registry);

/// Builds the normalized vector and decides the missing-data policy.
/// `preceding_empty_windows` counts consecutive empty windows immediately
/// before this one. Throws RegistryEmpty.
FeatureVector build_vector(const AggregationWindow& agg, const FeatureRegistry& registry,
                           std::size_t preceding_empty_windows, MissingDataPolicy policy = {});

}  // namespace gruwatch::features
