// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gruwatch/features/window.hpp"
#include "gruwatch/ingest/log_record.hpp"
#include "gruwatch/likelihood/likelihood.hpp"
#include "gruwatch/store/blob_store.hpp"
#include "gruwatch/store/document_store.hpp"

namespace gruwatch::alerting {

inline constexpr std::int64_t kReportHistoryMs = 48LL * 3600 * 1000;

struct SeriesPoint {
  std::int64_t t = 0;
  double v = 0.0;
  bool operator==(const SeriesPoint&) const = default;
};

struct FeatureSeries {
  features::FeatureKey key;
  std::vector<SeriesPoint> aggregated;  // one point per window
  std::vector<SeriesPoint> raw;         // responseTime of every matching record
};

struct Interval {
  std::int64_t start = 0;
  std::int64_t end = 0;
};

struct Report {
  std::string reportId;
  std::string alertId;
  std::int64_t windowStart = 0;
  std::int64_t windowEnd = 0;
  std::int64_t historyFrom = 0;
  std::int64_t historyTo = 0;
  std::string text;
  std::vector<FeatureSeries> series;
  std::vector<Interval> markers;
  bool degraded = false;  // history missing, text only
};

nlohmann::json to_json(const Report& r);

/// Windows and raw records preceding an assessment.
struct ReportHistory {
  bool available = false;
  std::vector<features::AggregationWindow> windows;
  std::vector<ingest::LogRecord> raw;
};

/// Text plus one aggregated/raw series pair per anomalous feature over the
/// 48 hours ending with the window. Without history the report is text only.
Report build_report(const likelihood::AnomalyAssessment& assessment, const std::string& report_id,
                    const std::string& alert_id, const ReportHistory& history);

/// Saves the report as a document; when that would exceed the document
/// limit the series move to the blob store under reports/<id>/series.json.
void save_report(store::DocumentStore& docs, store::BlobStore& blobs, const Report& report);

/// The stored report with series re-attached, or nullopt.
std::optional<nlohmann::json> load_report(const store::DocumentStore& docs, const store::BlobStore& blobs,
                                          const std::string& report_id);

}  // namespace gruwatch::alerting
