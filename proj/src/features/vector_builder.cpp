// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/features/vector_builder.hpp"

#include "gruwatch/error.hpp"
#include "gruwatch/features/seasonality.hpp"

namespace gruwatch::features {

std::string_view to_string(PredictionPolicy p) noexcept {
  switch (p) {
    case PredictionPolicy::Predict: return "Predict";
    case PredictionPolicy::PredictWithWarning: return "PredictWithWarning";
    case PredictionPolicy::SkipWithWarning: return "SkipWithWarning";
  }
  return "?";
}

PredictionPolicy policy_from_string(std::string_view s) {
  if (s == "Predict") return PredictionPolicy::Predict;
  if (s == "PredictWithWarning") return PredictionPolicy::PredictWithWarning;
  if (s == "SkipWithWarning") return PredictionPolicy::SkipWithWarning;
  throw Error(ErrorCode::InvalidConfig, "unknown prediction policy " + std::string(s));
}

std::vector<double> raw_row(const AggregationWindow& agg, const FeatureRegistry& registry) {
  std::vector<double> row(registry.column_count(), 0.0);
  const auto& keys = registry.keys();
  for (const auto& [key, value] : agg.values) {
    if (auto col = registry.column_of(key)) row[*col] = value;
  }
  const auto season = seasonal_features(agg.start);
  for (std::size_t s = 0; s < kSeasonalityColumns; ++s) row[keys.size() + s] = season[s];
  return row;
}

FeatureVector build_vector(const AggregationWindow& agg, const FeatureRegistry& registry,
                           std::size_t preceding_empty_windows, MissingDataPolicy policy) {
  if (registry.empty()) throw Error(ErrorCode::RegistryEmpty, "registry has no feature columns");

  FeatureVector v;
  v.windowStart = agg.start;
  v.registryVersion = registry.version();
  v.values = raw_row(agg, registry);
  for (const auto& [key, value] : agg.values) {
    if (!registry.contains(key)) v.unseenKeys.push_back(key);
  }

  const auto& bounds = registry.bounds();
  for (std::size_t c = 0; c < v.values.size(); ++c) v.values[c] = normalize(v.values[c], bounds[c]);

  if (agg.empty()) {
    v.policy = preceding_empty_windows + 1 >= policy.skipAfterEmptyWindows
                   ? PredictionPolicy::SkipWithWarning
                   : PredictionPolicy::PredictWithWarning;
  }
  return v;
}

}  // namespace gruwatch::features
