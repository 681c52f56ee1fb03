// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gruwatch/alerting/alert.hpp"
#include "gruwatch/alerting/feedback.hpp"
#include "gruwatch/alerting/report.hpp"
#include "gruwatch/alerting/webhook.hpp"
#include "gruwatch/config.hpp"
#include "gruwatch/orchestrator/event_log.hpp"

namespace gruwatch::alerting {

/// Supplies report history for [from, to).
using HistoryProvider = std::function<ReportHistory(std::int64_t from, std::int64_t to)>;
using Clock = std::function<std::int64_t()>;

/// Turns flagged assessments into persisted alerts and reports, delivers them
/// and serves alert, report and feedback queries.
class AlertService {
 public:
  AlertService(const Config& config, store::DocumentStore& docs, store::BlobStore& blobs,
               orchestrator::EventLog& events, HistoryProvider history, Clock clock);

  /// Enables webhook delivery. Without a transport alerts are stored only.
  void set_transport(WebhookTransport* transport, RetryPolicy policy);

  /// Builds, stores and delivers an alert for a flagged assessment. A revision
  /// that was already alerted is ignored. Returns the new alert, if any.
  std::optional<Alert> on_assessment(const likelihood::AnomalyAssessment& assessment);

  /// Alerts whose window starts at or after `since`, each with
  /// "latestFeedback" (or null) and "feedbackCount".
  nlohmann::json list_alerts(std::int64_t since) const;
  std::optional<nlohmann::json> report(const std::string& report_id) const;
  Feedback submit_feedback(const std::string& alert_id, std::string_view label, const std::string& submitter);
  std::vector<Feedback> feedback_history(const std::string& alert_id) const { return feedback_.history(alert_id); }

  std::size_t replay_outbox();

 private:
  const Config& config_;
  store::DocumentStore& docs_;
  store::BlobStore& blobs_;
  orchestrator::EventLog& events_;
  HistoryProvider history_;
  Clock clock_;
  FeedbackStore feedback_;
  Threader threader_;
  std::unique_ptr<WebhookDeliverer> deliverer_;
  mutable std::mutex mutex_;
};

}  // namespace gruwatch::alerting
