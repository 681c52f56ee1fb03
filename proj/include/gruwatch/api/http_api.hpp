// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <string>
#include <thread>

#include "gruwatch/alerting/alert_service.hpp"
#include "gruwatch/ingest/intake.hpp"

namespace httplib {
class Server;
}

namespace gruwatch::api {

/// HTTP surface:
///   POST /v1/logs                  push one record or an array of records
///   GET  /v1/alerts?since=<ms>     alerts with their latest feedback
///   GET  /v1/reports/{id}          report JSON
///   POST /v1/alerts/{id}/feedback  {"label", "submitter"}
/// When a token is configured every request needs "Authorization: Bearer <token>".
class HttpApi {
 public:
  HttpApi(ingest::Ingestor& ingestor, alerting::AlertService& alerts, std::string token = {});
  ~HttpApi();

  /// Binds and serves on a background thread. Port 0 picks a free port.
  /// Returns the bound port. Throws InvalidConfig when binding fails.
  int start(const std::string& host, int port);
  void stop();
  bool running() const;

 private:
  void install_routes();

  ingest::Ingestor& ingestor_;
  alerting::AlertService& alerts_;
  std::string token_;
  std::unique_ptr<httplib::Server> server_;
  std::thread thread_;
};

}  // namespace gruwatch::api
