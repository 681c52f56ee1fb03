// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "gruwatch/likelihood/likelihood.hpp"
#include "gruwatch/model/gru_autoencoder.hpp"

namespace gruwatch {

/// Runtime settings. Keys may be written flat ("model.lookback": 12) or
/// nested ({"model": {"lookback": 12}}); both spellings are accepted.
struct Config {
  // ingest
  std::size_t maxBodyBytes = 1'048'576;
  nlohmann::json filters;  // FilterRuleSet document, null = keep everything

  // features
  std::int64_t windowSeconds = 300;
  std::size_t skipAfterEmptyWindows = 4;
  bool perSourceKeys = false;  // prefix feature keys with the telemetry source id

  // model
  model::TrainingConfig training;
  double onlineLearningRate = 0.01;
  std::vector<model::TrainingConfig> grid;  // empty = train `training` directly

  // likelihood
  likelihood::LikelihoodConfig likelihood;

  // orchestrator
  std::int64_t tickIntervalSeconds = 300;
  double retrainIntervalHours = 6.0;  // <= 0 disables periodic retraining
  std::size_t retrainHorizonWindows = 9'000;
  std::size_t retrainMinWindows = 288;  // windows needed before the first model
  bool retrainAsync = true;             // false trains on the calling thread
  double retentionHours = 48.0;

  // alerting
  std::string webhookUrl;  // ALERT_WEBHOOK_URL overrides
  int webhookAttempts = 3;
  std::int64_t webhookBackoffMs = 500;
  std::int64_t threadGapMinutes = 10;
  std::string reportBaseUrl = "/v1/reports/";

  // persistence and API
  std::string dataDir = "gruwatch-data";
  std::string apiHost = "127.0.0.1";
  int apiPort = 8080;
  std::string apiToken;  // empty = no bearer check

  // evaluation
  std::size_t evalWarmupWindows = 288;

  std::int64_t window_ms() const { return windowSeconds * 1000; }
  std::int64_t retention_ms() const { return static_cast<std::int64_t>(retentionHours * 3'600'000.0); }
  std::int64_t retrain_interval_ms() const { return static_cast<std::int64_t>(retrainIntervalHours * 3'600'000.0); }

  /// Throws InvalidConfig.
  void validate() const;

  static Config from_json(const nlohmann::json& j);
  /// Throws FileUnreadable or InvalidConfig.
  static Config load(const std::filesystem::path& path);
  nlohmann::json to_json() const;

  /// Applies ALERT_WEBHOOK_URL when set.
  void apply_environment();
};

}  // namespace gruwatch
