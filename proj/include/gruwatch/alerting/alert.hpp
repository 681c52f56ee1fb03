// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "gruwatch/likelihood/likelihood.hpp"

namespace gruwatch::alerting {

inline constexpr std::int64_t kDefaultThreadGapMs = 10 * 60 * 1000;

struct Alert {
  std::string alertId;
  std::int64_t windowStart = 0;
  std::int64_t revision = 0;
  std::string summary;
  std::map<std::string, std::size_t> counts;  // anomalous features per component group
  double likelihood = 0.0;
  std::string reportId;
  std::string reportLink;
  std::string threadKey;
  std::int64_t createdAt = 0;

  bool operator==(const Alert&) const = default;
};

nlohmann::json to_json(const Alert& a);
Alert alert_from_json(const nlohmann::json& j);

/// "a-<windowStart>-r<revision>".
std::string alert_id_for(const likelihood::AnomalyAssessment& a);

/// "2020-10-04T15:10:00Z".
std::string format_utc(std::int64_t epoch_ms);

/// Anomalous features per component group (the appName).
std::map<std::string, std::size_t> count_by_group(const std::vector<features::FeatureKey>& keys);

struct PriorAlert {
  std::int64_t time = 0;
  std::string threadKey;
};

/// Chained threading: an alert within `gap_ms` (inclusive) of the closest
/// earlier-or-equal prior alert joins that alert's thread, otherwise a new
/// key "thread-<time>" is minted.
std::string thread_key(std::int64_t time, std::span<const PriorAlert> previous,
                       std::int64_t gap_ms = kDefaultThreadGapMs);

/// Incremental form of thread_key that remembers assigned keys.
class Threader {
 public:
  explicit Threader(std::int64_t gap_ms = kDefaultThreadGapMs) : gapMs_(gap_ms) {}
  std::string assign(std::int64_t time);
  void remember(std::int64_t time, const std::string& key) { threads_[time] = key; }

 private:
  std::int64_t gapMs_;
  std::map<std::int64_t, std::string> threads_;
};

/// Throws NotFlagged unless the assessment is flagged.
Alert build_alert(const likelihood::AnomalyAssessment& assessment, const std::string& thread,
                  const std::string& report_base_url, std::int64_t created_at);

}  // namespace gruwatch::alerting
