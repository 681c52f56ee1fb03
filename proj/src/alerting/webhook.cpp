// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/alerting/webhook.hpp"

#include <thread>

#include <httplib.h>

#include "gruwatch/error.hpp"

namespace gruwatch::alerting {

using nlohmann::json;

json webhook_payload(const Alert& alert) {
  return json{{"summary", alert.summary},
              {"counts", alert.counts},
              {"likelihood", alert.likelihood},
              {"reportLink", alert.reportLink},
              {"threadKey", alert.threadKey}};
}

json to_json(const DeliveryReceipt& r) {
  return json{{"alertId", r.alertId}, {"status", r.status}, {"attempts", r.attempts}, {"delivered", r.delivered}};
}

int HttpWebhookTransport::post(const std::string& url, const std::string& body) {
  const std::string scheme = "http://";
  if (url.rfind(scheme, 0) != 0) throw Error(ErrorCode::InvalidConfig, "webhook URL must start with http://");
  const std::size_t slash = url.find('/', scheme.size());
  const std::string host = url.substr(0, slash);
  const std::string path = slash == std::string::npos ? "/" : url.substr(slash);
  httplib::Client client(host);
  const auto secs = std::chrono::duration_cast<std::chrono::seconds>(timeout_);
  const auto usecs = std::chrono::duration_cast<std::chrono::microseconds>(timeout_ - secs);
  client.set_connection_timeout(secs.count(), usecs.count());
  client.set_read_timeout(secs.count(), usecs.count());
  auto res = client.Post(path, body, "application/json");
  return res ? res->status : 0;
}

WebhookDeliverer::WebhookDeliverer(WebhookTransport& transport, std::string url, RetryPolicy policy,
                                   store::DocumentStore& docs)
    : transport_(transport), url_(std::move(url)), policy_(std::move(policy)), docs_(docs) {
  if (!policy_.sleep) policy_.sleep = [](std::chrono::milliseconds d) { std::this_thread::sleep_for(d); };
}

DeliveryReceipt WebhookDeliverer::deliver(const Alert& alert) {
  DeliveryReceipt receipt;
  receipt.alertId = alert.alertId;
  const std::string body = webhook_payload(alert).dump();
  std::int64_t delay = policy_.baseDelayMs;
  for (int attempt = 1; attempt <= policy_.attempts; ++attempt) {
    receipt.attempts = attempt;
    try {
      receipt.status = transport_.post(url_, body);
    } catch (const std::exception&) {
      receipt.status = 0;
    }
    if (receipt.status >= 200 && receipt.status < 300) {
      receipt.delivered = true;
      docs_.put("deliveries", alert.alertId, to_json(receipt));
      docs_.remove("outbox", alert.alertId);
      return receipt;
    }
    if (attempt < policy_.attempts) {
      policy_.sleep(std::chrono::milliseconds(delay));
      delay *= 2;
    }
  }
  docs_.put("deliveries", alert.alertId, to_json(receipt));
  docs_.put("outbox", alert.alertId, json{{"alert", to_json(alert)}, {"receipt", to_json(receipt)}});
  throw Error(ErrorCode::WebhookUnreachable, alert.alertId + " not delivered after " +
                                                 std::to_string(receipt.attempts) + " attempts (last status " +
                                                 std::to_string(receipt.status) + ")");
}

std::size_t WebhookDeliverer::replay_outbox() {
  std::size_t delivered = 0;
  for (const auto& id : docs_.list("outbox")) {
    auto doc = docs_.get("outbox", id);
    if (!doc) continue;
    try {
      deliver(alert_from_json(doc->at("alert")));
      ++delivered;
    } catch (const Error& e) {
      if (e.code() != ErrorCode::WebhookUnreachable) throw;
    }
  }
  return delivered;
}

}  // namespace gruwatch::alerting
