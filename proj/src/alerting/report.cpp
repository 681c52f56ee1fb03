// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/alerting/report.hpp"

#include <cstdio>

#include "gruwatch/alerting/alert.hpp"

namespace gruwatch::alerting {

using nlohmann::json;

namespace {

json points_json(const std::vector<SeriesPoint>& pts) {
  json out = json::array();
  for (const auto& p : pts) out.push_back(json::array({p.t, p.v}));
  return out;
}

json series_json(const std::vector<FeatureSeries>& series) {
  json out = json::array();
  for (const auto& s : series) {
    out.push_back({{"feature", s.key.label()},
                   {"key", features::to_json(s.key)},
                   {"aggregated", points_json(s.aggregated)},
                   {"raw", points_json(s.raw)}});
  }
  return out;
}

}  // namespace

json to_json(const Report& r) {
  json markers = json::array();
  for (const auto& m : r.markers) markers.push_back({{"start", m.start}, {"end", m.end}});
  return json{{"reportId", r.reportId},       {"alertId", r.alertId},     {"windowStart", r.windowStart},
              {"windowEnd", r.windowEnd},     {"historyFrom", r.historyFrom}, {"historyTo", r.historyTo},
              {"text", r.text},               {"series", series_json(r.series)}, {"markers", markers},
              {"degraded", r.degraded}};
}

Report build_report(const likelihood::AnomalyAssessment& a, const std::string& report_id,
                    const std::string& alert_id, const ReportHistory& history) {
  Report r;
  r.reportId = report_id;
  r.alertId = alert_id;
  r.windowStart = a.windowStart;
  r.windowEnd = a.windowEnd;
  r.historyTo = a.windowEnd;
  r.historyFrom = a.windowEnd - kReportHistoryMs;
  r.markers.push_back({a.windowStart, a.windowEnd});

  std::string text = "Window " + format_utc(a.windowStart) + " to " + format_utc(a.windowEnd) + ": ";
  text += std::to_string(a.topAnomalousFeatures.size()) + " anomalous feature(s), ranked by reconstruction error.\n";
  for (const auto& key : a.topAnomalousFeatures) text += "- " + key.label() + "\n";
  r.degraded = !history.available;
  if (r.degraded) text += "History unavailable; series omitted.\n";
  r.text = std::move(text);
  if (r.degraded) return r;

  for (const auto& key : a.topAnomalousFeatures) {
    FeatureSeries s;
    s.key = key;
    for (const auto& w : history.windows) {
      if (w.start < r.historyFrom || w.start >= r.historyTo) continue;
      auto it = w.values.find(key);
      s.aggregated.push_back({w.start, it == w.values.end() ? 0.0 : it->second});
    }
    for (const auto& rec : history.raw) {
      if (rec.timestamp < r.historyFrom || rec.timestamp >= r.historyTo) continue;
      if (rec.appName == key.group.appName && rec.method == key.group.method &&
          rec.statusCode == key.group.statusCode) {
        s.raw.push_back({rec.timestamp, rec.responseTime});
      }
    }
    r.series.push_back(std::move(s));
  }
  return r;
}

void save_report(store::DocumentStore& docs, store::BlobStore& blobs, const Report& report) {
  json doc = to_json(report);
  if (store::document_size(doc) > store::kDocumentLimitBytes) {
    const std::string key = "reports/" + report.reportId + "/series.json";
    blobs.put(key, doc["series"].dump());
    doc["series"] = json::array();
    doc["seriesBlob"] = key;
  }
  docs.put("reports", report.reportId, doc);
}

std::optional<json> load_report(const store::DocumentStore& docs, const store::BlobStore& blobs,
                                const std::string& report_id) {
  auto doc = docs.get("reports", report_id);
  if (!doc) return std::nullopt;
  if (doc->contains("seriesBlob")) {
    if (auto bytes = blobs.get((*doc)["seriesBlob"].get<std::string>())) {
      (*doc)["series"] = json::parse(*bytes);
    } else {
      (*doc)["degraded"] = true;
    }
    doc->erase("seriesBlob");
  }
  return doc;
}

}  // namespace gruwatch::alerting
