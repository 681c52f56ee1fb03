// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gruwatch/features/seasonality.hpp"
#include "gruwatch/features/window.hpp"

namespace gruwatch::features {

struct Bounds {
  double min = 0.0;
  double max = 0.0;
  bool operator==(const Bounds&) const = default;
};

/// (value - min) / (max - min), unclamped. Degenerate bounds map to 0.
double normalize(double value, Bounds bounds) noexcept;

/// Ordered, versioned column set: the sorted feature keys followed by the
/// eight seasonality slots, with the min-max bounds captured at training.
class FeatureRegistry {
 public:
  FeatureRegistry() = default;
  FeatureRegistry(std::int64_t version, std::vector<FeatureKey> keys, std::vector<Bounds> key_bounds);

  std::int64_t version() const { return version_; }
  bool empty() const { return keys_.empty(); }

  /// Total columns D = keys + seasonality.
  std::size_t column_count() const { return keys_.size() + kSeasonalityColumns; }
  std::size_t key_count() const { return keys_.size(); }

  const std::vector<FeatureKey>& keys() const { return keys_; }
  /// Bounds for all D columns; the last eight are (-1, 1).
  const std::vector<Bounds>& bounds() const { return bounds_; }

  std::optional<std::size_t> column_of(const FeatureKey& key) const;
  bool contains(const FeatureKey& key) const { return column_of(key).has_value(); }

  std::string column_label(std::size_t column) const;
  /// Component group of a column: the appName, or "seasonality".
  std::string column_group(std::size_t column) const;

  nlohmann::json to_json() const;
  static FeatureRegistry from_json(const nlohmann::json& j);

  bool operator==(const FeatureRegistry&) const = default;

 private:
  std::int64_t version_ = 0;
  std::vector<FeatureKey> keys_;
  std::vector<Bounds> bounds_;
};

/// Builds the registry from a training set: union of observed keys, sorted;
/// bounds over the zero-filled training matrix. Version = previous + 1.
/// Throws EmptyTrainingSet.
FeatureRegistry register_features(std::span<const AggregationWindow> training_windows,
                                  std::int64_t previous_version = 0);

/// Registry documents must stay below this size in the document store.
inline constexpr std::size_t kMaxDocumentBytes = 1'000'000;

}  // namespace gruwatch::features
