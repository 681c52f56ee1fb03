// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gruwatch/ingest/log_record.hpp"

namespace gruwatch::features {

inline constexpr std::int64_t kDefaultWindowMs = 300'000;

enum class Statistic : std::uint8_t { Min, Max, Count, Median, Mean, Std, Skewness };

inline constexpr std::array<Statistic, 7> kAllStatistics = {
    Statistic::Min,  Statistic::Max, Statistic::Count,    Statistic::Median,
    Statistic::Mean, Statistic::Std, Statistic::Skewness,
};

std::string_view to_string(Statistic s) noexcept;
Statistic statistic_from_string(std::string_view s);

/// Identity of a response-time group: (source, component, verb, status).
/// `source` stays empty unless several telemetry sources are configured.
struct GroupKey {
  std::string source;
  std::string appName;
  std::string method;
  int statusCode = 0;

  auto operator<=>(const GroupKey&) const = default;
  bool operator==(const GroupKey&) const = default;
};

/// One column of the feature matrix. Ordering is lexicographic on the tuple,
/// which fixes the registry column order.
struct FeatureKey {
  GroupKey group;
  Statistic statistic = Statistic::Min;

  auto operator<=>(const FeatureKey&) const = default;
  bool operator==(const FeatureKey&) const = default;

  /// "catalog|GET|200|mean", prefixed with "source/" when a source is set.
  std::string label() const;
};

nlohmann::json to_json(const FeatureKey& key);
FeatureKey feature_key_from_json(const nlohmann::json& j);

/// Aggregated values of one window, [start, start + length).
struct AggregationWindow {
  std::int64_t start = 0;
  std::int64_t end = 0;
  std::map<FeatureKey, double> values;

  bool empty() const { return values.empty(); }
  bool operator==(const AggregationWindow&) const = default;
};

nlohmann::json to_json(const AggregationWindow& w);
AggregationWindow aggregation_window_from_json(const nlohmann::json& j);

/// floor(timestamp / window) * window. Aligned to epoch, i.e. astronomical time.
std::int64_t window_of(std::int64_t timestamp_ms, std::int64_t window_ms = kDefaultWindowMs) noexcept;

GroupKey group_of(const ingest::LogRecord& record, std::string source = {});

/// Groups responseTime by (appName, method, statusCode) and emits all seven
/// statistics per group. `sources`, when non-empty, is parallel to `records`
/// and adds the source id to every key.
AggregationWindow aggregate_window(std::span<const ingest::LogRecord> records, std::int64_t start,
                                   std::int64_t end, std::span<const std::string> sources = {});

}  // namespace gruwatch::features
