// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/api/http_api.hpp"

#include <httplib.h>

#include "gruwatch/error.hpp"

namespace gruwatch::api {

using nlohmann::json;

namespace {

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& code, const std::string& message) {
  reply(res, status, json{{"error", code}, {"message", message}});
}

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::PayloadTooLarge: return 413;
    case ErrorCode::UnknownAlert:
    case ErrorCode::NotFound: return 404;
    case ErrorCode::InvalidLabel:
    case ErrorCode::MalformedJson:
    case ErrorCode::MissingField:
    case ErrorCode::RangeViolation: return 400;
    default: return 500;
  }
}

}  // namespace

HttpApi::HttpApi(ingest::Ingestor& ingestor, alerting::AlertService& alerts, std::string token)
    : ingestor_(ingestor), alerts_(alerts), token_(std::move(token)), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

HttpApi::~HttpApi() { stop(); }

void HttpApi::install_routes() {
  auto& srv = *server_;

  srv.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    if (token_.empty() || req.get_header_value("Authorization") == "Bearer " + token_) {
      return httplib::Server::HandlerResponse::Unhandled;
    }
    reply_error(res, 401, "Unauthorized", "missing or wrong bearer token");
    return httplib::Server::HandlerResponse::Handled;
  });

  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const Error& e) {
      reply_error(res, status_for(e.code()), std::string(to_string(e.code())), e.detail());
    } catch (const std::exception& e) {
      reply_error(res, 500, "Internal", e.what());
    }
  });

  srv.Post("/v1/logs", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string source = req.has_header("X-Source-Id") ? req.get_header_value("X-Source-Id") : "push";
    const auto ack = ingestor_.ingest_push(req.body, source);
    reply(res, ack.accepted > 0 || ack.rejected == 0 ? 202 : 400,
          json{{"accepted", ack.accepted}, {"rejected", ack.rejected}});
  });

  srv.Get("/v1/alerts", [this](const httplib::Request& req, httplib::Response& res) {
    std::int64_t since = 0;
    if (req.has_param("since")) {
      try {
        since = std::stoll(req.get_param_value("since"));
      } catch (const std::exception&) {
        reply_error(res, 400, "RangeViolation", "since must be epoch milliseconds");
        return;
      }
    }
    reply(res, 200, alerts_.list_alerts(since));
  });

  srv.Get(R"(/v1/reports/([A-Za-z0-9_.\-]+))", [this](const httplib::Request& req, httplib::Response& res) {
    auto report = alerts_.report(req.matches[1]);
    if (!report) {
      reply_error(res, 404, "NotFound", "no report " + std::string(req.matches[1]));
      return;
    }
    reply(res, 200, *report);
  });

  srv.Post(R"(/v1/alerts/([A-Za-z0-9_.\-]+)/feedback)", [this](const httplib::Request& req, httplib::Response& res) {
    const json body = json::parse(req.body, nullptr, false);
    if (!body.is_object() || !body.contains("label") || !body["label"].is_string()) {
      reply_error(res, 400, "MalformedJson", "body must be {\"label\": ..., \"submitter\": ...}");
      return;
    }
    const std::string submitter = body.value("submitter", std::string{});
    const auto fb = alerts_.submit_feedback(req.matches[1], body["label"].get<std::string>(), submitter);
    json out = alerting::to_json(fb);
    out["historyLength"] = alerts_.feedback_history(fb.alertId).size();
    reply(res, 201, out);
  });
}

int HttpApi::start(const std::string& host, int port) {
  int bound = port;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (!server_->bind_to_port(host, port)) {
    bound = -1;
  }
  if (bound <= 0) throw Error(ErrorCode::InvalidConfig, "cannot bind " + host + ":" + std::to_string(port));
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  server_->wait_until_ready();
  return bound;
}

void HttpApi::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

bool HttpApi::running() const { return server_ && server_->is_running(); }

}  // namespace gruwatch::api
