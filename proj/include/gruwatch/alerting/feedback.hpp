// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gruwatch/store/document_store.hpp"

namespace gruwatch::alerting {

enum class FeedbackLabel { AnomalyImpactingClient, AnomalyNoImpact, NotAnomaly, NotSure };

std::string_view to_string(FeedbackLabel label) noexcept;
/// Throws InvalidLabel.
FeedbackLabel label_from_string(std::string_view s);

struct Feedback {
  std::string alertId;
  FeedbackLabel label = FeedbackLabel::NotSure;
  std::string submitter;
  std::int64_t submittedAt = 0;
  std::uint64_t seq = 0;  // per-alert submission order

  bool operator==(const Feedback&) const = default;
};

nlohmann::json to_json(const Feedback& f);
Feedback feedback_from_json(const nlohmann::json& j);

/// Append-only feedback per alert, kept in the "feedback" collection.
class FeedbackStore {
 public:
  explicit FeedbackStore(store::DocumentStore& docs) : docs_(docs) {}

  /// Throws UnknownAlert when the alert has no document, InvalidLabel for
  /// anything but the four labels.
  Feedback submit(const std::string& alert_id, std::string_view label, const std::string& submitter,
                  std::int64_t submitted_at);

  /// Every submission, oldest first.
  std::vector<Feedback> history(const std::string& alert_id) const;
  /// Latest by submittedAt, then by submission order.
  std::optional<Feedback> latest(const std::string& alert_id) const;

 private:
  store::DocumentStore& docs_;
  mutable std::mutex mutex_;
};

}  // namespace gruwatch::alerting
