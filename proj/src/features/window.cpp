// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/features/window.hpp"

#include "gruwatch/error.hpp"
#include "gruwatch/features/statistics.hpp"

namespace gruwatch::features {

std::string_view to_string(Statistic s) noexcept {
  switch (s) {
    case Statistic::Min: return "min";
    case Statistic::Max: return "max";
    case Statistic::Count: return "count";
    case Statistic::Median: return "median";
    case Statistic::Mean: return "mean";
    case Statistic::Std: return "std";
    case Statistic::Skewness: return "skewness";
  }
  return "?";
}

Statistic statistic_from_string(std::string_view s) {
  for (Statistic st : kAllStatistics) {
    if (to_string(st) == s) return st;
  }
  throw Error(ErrorCode::MalformedJson, "unknown statistic '" + std::string(s) + "'");
}

std::string FeatureKey::label() const {
  std::string out;
  if (!group.source.empty()) out += group.source + "/";
  out += group.appName + "|" + group.method + "|" + std::to_string(group.statusCode) + "|";
  out += to_string(statistic);
  return out;
}

nlohmann::json to_json(const FeatureKey& key) {
  nlohmann::json j{
      {"appName", key.group.appName},
      {"method", key.group.method},
      {"statusCode", key.group.statusCode},
      {"statistic", to_string(key.statistic)},
  };
  if (!key.group.source.empty()) j["source"] = key.group.source;
  return j;
}

FeatureKey feature_key_from_json(const nlohmann::json& j) {
  FeatureKey key;
  key.group.source = j.value("source", std::string());
  key.group.appName = j.at("appName").get<std::string>();
  key.group.method = j.at("method").get<std::string>();
  key.group.statusCode = j.at("statusCode").get<int>();
  key.statistic = statistic_from_string(j.at("statistic").get<std::string>());
  return key;
}

nlohmann::json to_json(const AggregationWindow& w) {
  nlohmann::json values = nlohmann::json::array();
  for (const auto& [key, value] : w.values) {
    nlohmann::json entry = to_json(key);
    entry["value"] = value;
    values.push_back(std::move(entry));
  }
  return {{"start", w.start}, {"end", w.end}, {"values", std::move(values)}};
}

AggregationWindow aggregation_window_from_json(const nlohmann::json& j) {
  AggregationWindow w;
  w.start = j.at("start").get<std::int64_t>();
  w.end = j.at("end").get<std::int64_t>();
  for (const auto& entry : j.at("values")) {
    w.values.emplace(feature_key_from_json(entry), entry.at("value").get<double>());
  }
  return w;
}

std::int64_t window_of(std::int64_t timestamp_ms, std::int64_t window_ms) noexcept {
  std::int64_t q = timestamp_ms / window_ms;
  if (timestamp_ms % window_ms != 0 && timestamp_ms < 0) --q;
  return q * window_ms;
}

GroupKey group_of(const ingest::LogRecord& record, std::string source) {
  return GroupKey{std::move(source), record.appName, record.method, record.statusCode};
}

AggregationWindow aggregate_window(std::span<const ingest::LogRecord> records, std::int64_t start,
                                   std::int64_t end, std::span<const std::string> sources) {
  AggregationWindow w{start, end, {}};
  std::map<GroupKey, std::vector<double>> groups;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    groups[group_of(r, sources.empty() ? std::string() : sources[i])].push_back(r.responseTime);
  }
  for (const auto& [group, values] : groups) {
    const SummaryStatistics s = summarize(values);
    const double by_stat[] = {s.min, s.max, s.count, s.median, s.mean, s.std, s.skewness};
    for (Statistic st : kAllStatistics) {
      w.values.emplace(FeatureKey{group, st}, by_stat[static_cast<int>(st)]);
    }
  }
  return w;
}

}  // namespace gruwatch::features
