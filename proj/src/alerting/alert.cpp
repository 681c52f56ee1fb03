// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/alerting/alert.hpp"

#include <cstdio>
#include <ctime>

#include "gruwatch/error.hpp"

namespace gruwatch::alerting {

using nlohmann::json;

json to_json(const Alert& a) {
  return json{{"alertId", a.alertId},     {"windowStart", a.windowStart}, {"revision", a.revision},
              {"summary", a.summary},     {"counts", a.counts},           {"likelihood", a.likelihood},
              {"reportId", a.reportId},   {"reportLink", a.reportLink},   {"threadKey", a.threadKey},
              {"createdAt", a.createdAt}};
}

Alert alert_from_json(const json& j) {
  try {
    Alert a;
    a.alertId = j.at("alertId").get<std::string>();
    a.windowStart = j.at("windowStart").get<std::int64_t>();
    a.revision = j.at("revision").get<std::int64_t>();
    a.summary = j.at("summary").get<std::string>();
    a.counts = j.at("counts").get<std::map<std::string, std::size_t>>();
    a.likelihood = j.at("likelihood").get<double>();
    a.reportId = j.at("reportId").get<std::string>();
    a.reportLink = j.at("reportLink").get<std::string>();
    a.threadKey = j.at("threadKey").get<std::string>();
    a.createdAt = j.at("createdAt").get<std::int64_t>();
    return a;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
}

std::string alert_id_for(const likelihood::AnomalyAssessment& a) {
  return "a-" + std::to_string(a.windowStart) + "-r" + std::to_string(a.revision);
}

std::string format_utc(std::int64_t epoch_ms) {
  std::time_t secs = static_cast<std::time_t>(epoch_ms / 1000);
  if (epoch_ms < 0 && epoch_ms % 1000 != 0) --secs;
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::map<std::string, std::size_t> count_by_group(const std::vector<features::FeatureKey>& keys) {
  std::map<std::string, std::size_t> counts;
  for (const auto& k : keys) ++counts[k.group.appName];
  return counts;
}

std::string thread_key(std::int64_t time, std::span<const PriorAlert> previous, std::int64_t gap_ms) {
  const PriorAlert* closest = nullptr;
  for (const auto& p : previous) {
    if (p.time <= time && (closest == nullptr || p.time > closest->time)) closest = &p;
  }
  if (closest != nullptr && time - closest->time <= gap_ms) return closest->threadKey;
  return "thread-" + std::to_string(time);
}

std::string Threader::assign(std::int64_t time) {
  std::string key = "thread-" + std::to_string(time);
  auto it = threads_.upper_bound(time);
  if (it != threads_.begin()) {
    --it;
    if (time - it->first <= gapMs_) key = it->second;
  }
  threads_[time] = key;
  return key;
}

Alert build_alert(const likelihood::AnomalyAssessment& assessment, const std::string& thread,
                  const std::string& report_base_url, std::int64_t created_at) {
  if (!assessment.flagged) {
    throw Error(ErrorCode::NotFlagged, "assessment " + assessment.key() + " is not flagged");
  }
  Alert a;
  a.alertId = alert_id_for(assessment);
  a.windowStart = assessment.windowStart;
  a.revision = assessment.revision;
  a.counts = count_by_group(assessment.topAnomalousFeatures);
  a.likelihood = assessment.likelihood;
  a.reportId = "r-" + std::to_string(assessment.windowStart) + "-r" + std::to_string(assessment.revision);
  a.reportLink = report_base_url + a.reportId;
  a.threadKey = thread;
  a.createdAt = created_at;

  char likelihood_text[32];
  std::snprintf(likelihood_text, sizeof likelihood_text, "%.4f", assessment.likelihood);
  std::string summary = "Anomaly at " + format_utc(assessment.windowStart) + " (likelihood " + likelihood_text + ")";
  if (assessment.revision > 0) summary += ", revision " + std::to_string(assessment.revision);
  summary += ": " + std::to_string(assessment.topAnomalousFeatures.size()) + " anomalous feature" +
             (assessment.topAnomalousFeatures.size() == 1 ? "" : "s");
  if (!a.counts.empty()) {
    summary += " (";
    bool first = true;
    for (const auto& [group, n] : a.counts) {
      if (!first) summary += ", ";
      summary += group + " " + std::to_string(n);
      first = false;
    }
    summary += ")";
  }
  a.summary = summary;
  return a;
}

}  // namespace gruwatch::alerting
