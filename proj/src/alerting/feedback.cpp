// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/alerting/feedback.hpp"

#include <algorithm>
#include <cstdio>

#include "gruwatch/error.hpp"

namespace gruwatch::alerting {

using nlohmann::json;

std::string_view to_string(FeedbackLabel label) noexcept {
  switch (label) {
    case FeedbackLabel::AnomalyImpactingClient: return "AnomalyImpactingClient";
    case FeedbackLabel::AnomalyNoImpact: return "AnomalyNoImpact";
    case FeedbackLabel::NotAnomaly: return "NotAnomaly";
    case FeedbackLabel::NotSure: return "NotSure";
  }
  return "NotSure";
}

FeedbackLabel label_from_string(std::string_view s) {
  for (auto l : {FeedbackLabel::AnomalyImpactingClient, FeedbackLabel::AnomalyNoImpact, FeedbackLabel::NotAnomaly,
                 FeedbackLabel::NotSure}) {
    if (to_string(l) == s) return l;
  }
  throw Error(ErrorCode::InvalidLabel, "unknown feedback label '" + std::string(s) + "'");
}

json to_json(const Feedback& f) {
  return json{{"alertId", f.alertId},
              {"label", to_string(f.label)},
              {"submitter", f.submitter},
              {"submittedAt", f.submittedAt},
              {"seq", f.seq}};
}

Feedback feedback_from_json(const json& j) {
  Feedback f;
  f.alertId = j.at("alertId").get<std::string>();
  f.label = label_from_string(j.at("label").get<std::string>());
  f.submitter = j.at("submitter").get<std::string>();
  f.submittedAt = j.at("submittedAt").get<std::int64_t>();
  f.seq = j.at("seq").get<std::uint64_t>();
  return f;
}

Feedback FeedbackStore::submit(const std::string& alert_id, std::string_view label, const std::string& submitter,
                               std::int64_t submitted_at) {
  const FeedbackLabel parsed = label_from_string(label);
  std::lock_guard lock(mutex_);
  if (alert_id.empty() || !docs_.get("alerts", alert_id)) throw Error(ErrorCode::UnknownAlert, alert_id);
  Feedback f{alert_id, parsed, submitter, submitted_at, history(alert_id).size()};
  char seq[24];
  std::snprintf(seq, sizeof seq, "%08llu", static_cast<unsigned long long>(f.seq));
  docs_.put("feedback", alert_id + "~" + seq, to_json(f));
  return f;
}

std::vector<Feedback> FeedbackStore::history(const std::string& alert_id) const {
  std::vector<Feedback> out;
  const std::string prefix = alert_id + "~";
  for (const auto& id : docs_.list("feedback")) {
    if (id.rfind(prefix, 0) != 0) continue;
    if (auto doc = docs_.get("feedback", id)) out.push_back(feedback_from_json(*doc));
  }
  std::sort(out.begin(), out.end(), [](const Feedback& a, const Feedback& b) { return a.seq < b.seq; });
  return out;
}

std::optional<Feedback> FeedbackStore::latest(const std::string& alert_id) const {
  auto all = history(alert_id);
  if (all.empty()) return std::nullopt;
  return *std::max_element(all.begin(), all.end(), [](const Feedback& a, const Feedback& b) {
    return a.submittedAt != b.submittedAt ? a.submittedAt < b.submittedAt : a.seq < b.seq;
  });
}

}  // namespace gruwatch::alerting
