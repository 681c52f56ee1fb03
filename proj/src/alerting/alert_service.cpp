// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/alerting/alert_service.hpp"

#include <algorithm>

#include "gruwatch/error.hpp"

namespace gruwatch::alerting {

using nlohmann::json;

AlertService::AlertService(const Config& config, store::DocumentStore& docs, store::BlobStore& blobs,
                           orchestrator::EventLog& events, HistoryProvider history, Clock clock)
    : config_(config),
      docs_(docs),
      blobs_(blobs),
      events_(events),
      history_(std::move(history)),
      clock_(std::move(clock)),
      feedback_(docs),
      threader_(config.threadGapMinutes * 60'000) {
  for (const auto& id : docs_.list("alerts")) {
    if (auto doc = docs_.get("alerts", id)) {
      const Alert a = alert_from_json(*doc);
      threader_.remember(a.windowStart, a.threadKey);
    }
  }
}

void AlertService::set_transport(WebhookTransport* transport, RetryPolicy policy) {
  std::lock_guard lock(mutex_);
  if (transport == nullptr || config_.webhookUrl.empty()) {
    deliverer_.reset();
    return;
  }
  deliverer_ = std::make_unique<WebhookDeliverer>(*transport, config_.webhookUrl, std::move(policy), docs_);
}

std::optional<Alert> AlertService::on_assessment(const likelihood::AnomalyAssessment& assessment) {
  if (!assessment.flagged) return std::nullopt;
  std::lock_guard lock(mutex_);
  const std::string id = alert_id_for(assessment);
  if (docs_.get("alerts", id)) return std::nullopt;

  const std::int64_t now = clock_();
  Alert alert = build_alert(assessment, threader_.assign(assessment.windowStart), config_.reportBaseUrl, now);

  ReportHistory history;
  if (history_) {
    try {
      history = history_(assessment.windowEnd - kReportHistoryMs, assessment.windowEnd);
    } catch (const std::exception& e) {
      events_.emit("history_unavailable", "warning", now, {{"alertId", id}, {"error", e.what()}});
    }
  }
  save_report(docs_, blobs_, build_report(assessment, alert.reportId, alert.alertId, history));
  docs_.put("alerts", alert.alertId, to_json(alert));
  events_.emit("alert_created", "info", now, {{"alertId", alert.alertId}, {"threadKey", alert.threadKey}});

  if (deliverer_) {
    try {
      deliverer_->deliver(alert);
    } catch (const Error& e) {
      events_.emit("webhook_unreachable", "error", now, {{"alertId", alert.alertId}, {"error", e.what()}});
    }
  }
  return alert;
}

json AlertService::list_alerts(std::int64_t since) const {
  json out = json::array();
  for (const auto& id : docs_.list("alerts")) {
    auto doc = docs_.get("alerts", id);
    if (!doc || (*doc)["windowStart"].get<std::int64_t>() < since) continue;
    auto latest = feedback_.latest(id);
    (*doc)["latestFeedback"] = latest ? to_json(*latest) : json(nullptr);
    (*doc)["feedbackCount"] = feedback_.history(id).size();
    out.push_back(std::move(*doc));
  }
  std::stable_sort(out.begin(), out.end(), [](const json& a, const json& b) {
    return a["windowStart"].get<std::int64_t>() < b["windowStart"].get<std::int64_t>();
  });
  return out;
}

std::optional<json> AlertService::report(const std::string& report_id) const {
  return load_report(docs_, blobs_, report_id);
}

Feedback AlertService::submit_feedback(const std::string& alert_id, std::string_view label,
                                       const std::string& submitter) {
  return feedback_.submit(alert_id, label, submitter, clock_());
}

std::size_t AlertService::replay_outbox() {
  std::lock_guard lock(mutex_);
  return deliverer_ ? deliverer_->replay_outbox() : 0;
}

}  // namespace gruwatch::alerting
