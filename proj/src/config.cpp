// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/config.hpp"

#include <cstdlib>
#include <fstream>

#include "gruwatch/error.hpp"

namespace gruwatch {

using nlohmann::json;

namespace {

// Looks up "a.b" either as a flat key or as a nested path.
const json* find_key(const json& root, const std::string& dotted) {
  if (auto it = root.find(dotted); it != root.end()) return &*it;
  const json* node = &root;
  std::size_t begin = 0;
  while (true) {
    const std::size_t dot = dotted.find('.', begin);
    const std::string part = dotted.substr(begin, dot == std::string::npos ? std::string::npos : dot - begin);
    if (!node->is_object()) return nullptr;
    auto it = node->find(part);
    if (it == node->end()) return nullptr;
    node = &*it;
    if (dot == std::string::npos) return node;
    begin = dot + 1;
  }
}

template <typename T>
void read(const json& root, const std::string& key, T& out) {
  const json* v = find_key(root, key);
  if (v == nullptr || v->is_null()) return;
  try {
    out = v->get<T>();
  } catch (const json::exception&) {
    throw Error(ErrorCode::InvalidConfig, "config key " + key + " has the wrong type");
  }
}

void read_training(const json& root, const std::string& prefix, model::TrainingConfig& t) {
  std::size_t hidden = 0;
  read(root, prefix + "hidden", hidden);
  if (hidden > 0) t.encoderHidden = t.decoderHidden = hidden;
  read(root, prefix + "encoder_hidden", t.encoderHidden);
  read(root, prefix + "decoder_hidden", t.decoderHidden);
  read(root, prefix + "lookback", t.lookback);
  read(root, prefix + "epochs", t.epochs);
  read(root, prefix + "batch_size", t.batchSize);
  read(root, prefix + "learning_rate", t.learningRate);
  read(root, prefix + "grad_clip", t.gradClip);
  read(root, prefix + "seed", t.seed);
}

}  // namespace

void Config::validate() const {
  auto fail = [](const std::string& what) { throw Error(ErrorCode::InvalidConfig, what); };
  if (maxBodyBytes == 0) fail("ingest.max_body_bytes must be positive");
  if (windowSeconds <= 0) fail("features.window_seconds must be positive");
  if (skipAfterEmptyWindows == 0) fail("features.skip_after_empty_windows must be positive");
  training.validate();
  for (const auto& g : grid) g.validate();
  if (!(onlineLearningRate >= 0.0)) fail("model.online_learning_rate must be non-negative");
  likelihood.validate();
  if (tickIntervalSeconds <= 0) fail("tick.interval_seconds must be positive");
  if (retrainHorizonWindows <= training.lookback) fail("retrain.horizon_windows must exceed the lookback");
  if (retrainMinWindows <= training.lookback) fail("retrain.min_windows must exceed the lookback");
  if (!(retentionHours > 0.0)) fail("retention.hours must be positive");
  if (webhookAttempts < 1) fail("alerting.webhook_attempts must be at least 1");
  if (webhookBackoffMs < 0) fail("alerting.webhook_backoff_ms must be non-negative");
  if (threadGapMinutes < 0) fail("alerting.thread_gap_minutes must be non-negative");
  if (apiPort < 0 || apiPort > 65535) fail("api.port out of range");
}

Config Config::from_json(const json& j) {
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "config root must be an object");
  Config c;
  read(j, "ingest.max_body_bytes", c.maxBodyBytes);
  if (const json* f = find_key(j, "ingest.filters")) c.filters = *f;
  read(j, "features.window_seconds", c.windowSeconds);
  read(j, "features.skip_after_empty_windows", c.skipAfterEmptyWindows);
  read(j, "features.per_source_keys", c.perSourceKeys);
  read_training(j, "model.", c.training);
  read(j, "model.online_learning_rate", c.onlineLearningRate);
  if (const json* grid = find_key(j, "model.grid")) {
    if (!grid->is_array()) throw Error(ErrorCode::InvalidConfig, "model.grid must be an array");
    for (const auto& entry : *grid) {
      model::TrainingConfig t = c.training;
      read_training(entry, "", t);
      c.grid.push_back(t);
    }
  }
  read(j, "likelihood.window_w", c.likelihood.window);
  read(j, "likelihood.short_window", c.likelihood.shortWindow);
  read(j, "likelihood.threshold", c.likelihood.threshold);
  read(j, "tick.interval_seconds", c.tickIntervalSeconds);
  read(j, "retrain.interval_hours", c.retrainIntervalHours);
  read(j, "retrain.horizon_windows", c.retrainHorizonWindows);
  read(j, "retrain.min_windows", c.retrainMinWindows);
  read(j, "retrain.async", c.retrainAsync);
  read(j, "retention.hours", c.retentionHours);
  read(j, "alerting.webhook_url", c.webhookUrl);
  read(j, "alerting.webhook_attempts", c.webhookAttempts);
  read(j, "alerting.webhook_backoff_ms", c.webhookBackoffMs);
  read(j, "alerting.thread_gap_minutes", c.threadGapMinutes);
  read(j, "alerting.report_base_url", c.reportBaseUrl);
  read(j, "storage.data_dir", c.dataDir);
  read(j, "api.host", c.apiHost);
  read(j, "api.port", c.apiPort);
  read(j, "api.token", c.apiToken);
  read(j, "eval.warmup_windows", c.evalWarmupWindows);
  c.validate();
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileUnreadable, "cannot open config " + path.string());
  json j = json::parse(in, nullptr, false, /*ignore_comments=*/true);
  if (j.is_discarded()) throw Error(ErrorCode::InvalidConfig, "config " + path.string() + " is not valid JSON");
  return from_json(j);
}

json Config::to_json() const {
  json grid_json = json::array();
  for (const auto& g : grid) grid_json.push_back(g.to_json());
  return json{
      {"ingest", {{"max_body_bytes", maxBodyBytes}, {"filters", filters}}},
      {"features", {{"window_seconds", windowSeconds}, {"skip_after_empty_windows", skipAfterEmptyWindows},
                    {"per_source_keys", perSourceKeys}}},
      {"model",
       {{"lookback", training.lookback},
        {"encoder_hidden", training.encoderHidden},
        {"decoder_hidden", training.decoderHidden},
        {"epochs", training.epochs},
        {"batch_size", training.batchSize},
        {"learning_rate", training.learningRate},
        {"grad_clip", training.gradClip},
        {"seed", training.seed},
        {"online_learning_rate", onlineLearningRate},
        {"grid", grid_json}}},
      {"likelihood",
       {{"window_w", likelihood.window}, {"short_window", likelihood.shortWindow}, {"threshold", likelihood.threshold}}},
      {"tick", {{"interval_seconds", tickIntervalSeconds}}},
      {"retrain",
       {{"interval_hours", retrainIntervalHours},
        {"horizon_windows", retrainHorizonWindows},
        {"min_windows", retrainMinWindows},
        {"async", retrainAsync}}},
      {"retention", {{"hours", retentionHours}}},
      {"alerting",
       {{"webhook_url", webhookUrl},
        {"webhook_attempts", webhookAttempts},
        {"webhook_backoff_ms", webhookBackoffMs},
        {"thread_gap_minutes", threadGapMinutes},
        {"report_base_url", reportBaseUrl}}},
      {"storage", {{"data_dir", dataDir}}},
      {"api", {{"host", apiHost}, {"port", apiPort}, {"token", apiToken}}},
      {"eval", {{"warmup_windows", evalWarmupWindows}}},
  };
}

void Config::apply_environment() {
  if (const char* url = std::getenv("ALERT_WEBHOOK_URL"); url != nullptr && *url != '\0') webhookUrl = url;
}

}  // namespace gruwatch
