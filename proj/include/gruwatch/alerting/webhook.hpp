// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>

#include <json.hpp>

#include "gruwatch/alerting/alert.hpp"
#include "gruwatch/store/document_store.hpp"

namespace gruwatch::alerting {

/// The outbound body: exactly {summary, counts, likelihood, reportLink, threadKey}.
nlohmann::json webhook_payload(const Alert& alert);

/// Sends one POST. Returns the HTTP status, or 0 when no response arrived.
class WebhookTransport {
 public:
  virtual ~WebhookTransport() = default;
  virtual int post(const std::string& url, const std::string& body) = 0;
};

/// Plain-HTTP transport ("http://host[:port]/path").
class HttpWebhookTransport final : public WebhookTransport {
 public:
  explicit HttpWebhookTransport(std::chrono::milliseconds timeout = std::chrono::seconds(5)) : timeout_(timeout) {}
  int post(const std::string& url, const std::string& body) override;

 private:
  std::chrono::milliseconds timeout_;
};

struct RetryPolicy {
  int attempts = 3;
  std::int64_t baseDelayMs = 500;  // doubled after each failed attempt
  std::function<void(std::chrono::milliseconds)> sleep;  // defaults to this_thread::sleep_for
};

struct DeliveryReceipt {
  std::string alertId;
  int status = 0;
  int attempts = 0;
  bool delivered = false;
};

nlohmann::json to_json(const DeliveryReceipt& r);

/// Delivers alerts with retries. Final failures are written to the "outbox"
/// collection for manual replay and raise WebhookUnreachable.
class WebhookDeliverer {
 public:
  WebhookDeliverer(WebhookTransport& transport, std::string url, RetryPolicy policy, store::DocumentStore& docs);

  DeliveryReceipt deliver(const Alert& alert);

  /// Re-sends every queued alert once through deliver. Returns how many went through.
  std::size_t replay_outbox();

 private:
  WebhookTransport& transport_;
  std::string url_;
  RetryPolicy policy_;
  store::DocumentStore& docs_;
};

}  // namespace gruwatch::alerting
