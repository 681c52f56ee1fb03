// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/features/registry.hpp"

#include <algorithm>
#include <set>

#include "gruwatch/error.hpp"

namespace gruwatch::features {

double normalize(double value, Bounds bounds) noexcept {
  if (bounds.max == bounds.min) return 0.0;
  return (value - bounds.min) / (bounds.max - bounds.min);
}

FeatureRegistry::FeatureRegistry(std::int64_t version, std::vector<FeatureKey> keys,
                                 std::vector<Bounds> key_bounds)
    : version_(version), keys_(std::move(keys)), bounds_(std::move(key_bounds)) {
  if (bounds_.size() != keys_.size()) {
    throw Error(ErrorCode::ShapeMismatch, "registry keys and bounds differ in length");
  }
  if (!std::is_sorted(keys_.begin(), keys_.end()) ||
      std::adjacent_find(keys_.begin(), keys_.end()) != keys_.end()) {
    throw Error(ErrorCode::InvalidConfig, "registry keys must be strictly ordered");
  }
  for (const auto& b : bounds_) {
    if (!(b.min <= b.max)) throw Error(ErrorCode::RangeViolation, "registry bounds with min > max");
  }
  bounds_.insert(bounds_.end(), kSeasonalityColumns, Bounds{-1.0, 1.0});
}

std::optional<std::size_t> FeatureRegistry::column_of(const FeatureKey& key) const {
  auto it = std::lower_bound(keys_.begin(), keys_.end(), key);
  if (it == keys_.end() || *it != key) return std::nullopt;
  return static_cast<std::size_t>(it - keys_.begin());
}

std::string FeatureRegistry::column_label(std::size_t column) const {
  if (column < keys_.size()) return keys_[column].label();
  return std::string(seasonality_label(column - keys_.size()));
}

std::string FeatureRegistry::column_group(std::size_t column) const {
  if (column < keys_.size()) return keys_[column].group.appName;
  return "seasonality";
}

nlohmann::json FeatureRegistry::to_json() const {
  nlohmann::json columns = nlohmann::json::array();
  nlohmann::json bounds = nlohmann::json::array();
  for (std::size_t i = 0; i < keys_.size(); ++i) {
    columns.push_back(features::to_json(keys_[i]));
    bounds.push_back({bounds_[i].min, bounds_[i].max});
  }
  return {{"version", version_}, {"columns", std::move(columns)}, {"bounds", std::move(bounds)}};
}

FeatureRegistry FeatureRegistry::from_json(const nlohmann::json& j) {
  std::vector<FeatureKey> keys;
  std::vector<Bounds> bounds;
  for (const auto& c : j.at("columns")) keys.push_back(feature_key_from_json(c));
  for (const auto& b : j.at("bounds")) bounds.push_back({b.at(0).get<double>(), b.at(1).get<double>()});
  return FeatureRegistry(j.at("version").get<std::int64_t>(), std::move(keys), std::move(bounds));
}

FeatureRegistry register_features(std::span<const AggregationWindow> training_windows,
                                  std::int64_t previous_version) {
  if (training_windows.empty()) throw Error(ErrorCode::EmptyTrainingSet, "no training windows");

  std::set<FeatureKey> observed;
  for (const auto& w : training_windows) {
    for (const auto& [key, value] : w.values) observed.insert(key);
  }
  std::vector<FeatureKey> keys(observed.begin(), observed.end());
  std::vector<Bounds> bounds(keys.size(), Bounds{0.0, 0.0});
  std::vector<bool> seeded(keys.size(), false);

  for (const auto& w : training_windows) {
    auto it = w.values.begin();
    for (std::size_t c = 0; c < keys.size(); ++c) {
      double v = 0.0;  // absent keys are zero-filled in the training matrix
      if (it != w.values.end() && it->first == keys[c]) {
        v = it->second;
        ++it;
      }
      if (!seeded[c]) {
        bounds[c] = {v, v};
        seeded[c] = true;
      } else {
        bounds[c].min = std::min(bounds[c].min, v);
        bounds[c].max = std::max(bounds[c].max, v);
      }
    }
  }
  return FeatureRegistry(previous_version + 1, std::move(keys), std::move(bounds));
}

}  // namespace gruwatch::features
