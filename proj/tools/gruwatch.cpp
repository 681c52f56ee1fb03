// SPDX-License-Identifier: Apache-2.0
// Command-line entry point: resident service, one-shot tick, forced retrain,
// file replay, offline evaluation and synthetic stream generation.
#include <atomic>
#include <chrono>
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "gruwatch/alerting/alert_service.hpp"
#include "gruwatch/api/http_api.hpp"
#include "gruwatch/config.hpp"
#include "gruwatch/error.hpp"
#include "gruwatch/evalbench/evaluate.hpp"
#include "gruwatch/evalbench/synthetic.hpp"
#include "gruwatch/ingest/filter.hpp"
#include "gruwatch/ingest/replay.hpp"
#include "gruwatch/orchestrator/detector.hpp"
#include "gruwatch/store/blob_store.hpp"
#include "gruwatch/store/document_store.hpp"

namespace {

using namespace gruwatch;
using nlohmann::json;

std::atomic<bool> g_stop{false};

void on_signal(int) { g_stop.store(true); }

std::int64_t wall_ms() {
  return std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::system_clock::now().time_since_epoch())
      .count();
}

// Everything a stateful subcommand needs, loaded from the data directory.
struct Runtime {
  Config config;
  orchestrator::EventLog events{&std::clog};
  store::FileDocumentStore docs;
  store::FileBlobStore blobs;
  orchestrator::Detector detector;
  alerting::HttpWebhookTransport transport;
  alerting::AlertService alerts;

  explicit Runtime(const Config& c)
      : config(c),
        docs(std::filesystem::path(c.dataDir) / "documents"),
        blobs(std::filesystem::path(c.dataDir) / "blobs"),
        detector(c, events),
        alerts(config, docs, blobs, events, history_provider(), wall_ms) {
    detector.load(docs, blobs);
    alerts.set_transport(&transport, alerting::RetryPolicy{config.webhookAttempts, config.webhookBackoffMs, {}});
    detector.set_sink([this](const likelihood::AnomalyAssessment& a) { alerts.on_assessment(a); });
  }

  alerting::HistoryProvider history_provider() {
    return [this](std::int64_t from, std::int64_t to) {
      alerting::ReportHistory h;
      const auto& ws = detector.windows();
      for (std::int64_t s = features::window_of(from, ws.window_ms()); s < to; s += ws.window_ms()) {
        if (ws.is_closed(s)) h.windows.push_back(ws.window(s));
      }
      for (const auto& e : ws.raw_between(from, to)) h.raw.push_back(e.record);
      h.available = !h.windows.empty();
      return h;
    };
  }

  void tick_and_save(std::int64_t now) {
    try {
      for (const auto& a : detector.tick(now)) std::cout << likelihood::to_json(a).dump() << '\n';
    } catch (const Error& e) {
      events.emit("tick_failure", "error", now, {{"error", e.what()}});
    }
    detector.save(docs, blobs);
  }
};

Config load_config(const std::string& path, const std::string& data_dir) {
  Config c = path.empty() ? Config{} : Config::load(path);
  if (!data_dir.empty()) c.dataDir = data_dir;
  c.apply_environment();
  return c;
}

std::vector<ingest::LogRecord> read_records(const std::string& path) {
  std::vector<ingest::LogRecord> out;
  ingest::replay_file(path, {}, [&](const ingest::LogRecord& r) { out.push_back(r); });
  return out;
}

int cmd_run(const Config& config) {
  Runtime rt(config);
  ingest::IntakeChannel channel;
  ingest::Ingestor ingestor(channel,
                            config.filters.is_null() ? ingest::FilterRuleSet{} : ingest::FilterRuleSet::from_json(config.filters),
                            config.maxBodyBytes);
  api::HttpApi http(ingestor, rt.alerts, config.apiToken);
  const int port = http.start(config.apiHost, config.apiPort);
  rt.events.emit("service_started", "info", wall_ms(), {{"host", config.apiHost}, {"port", port}});
  if (const std::size_t sent = rt.alerts.replay_outbox(); sent > 0) {
    rt.events.emit("outbox_replayed", "info", wall_ms(), {{"delivered", sent}});
  }

  const std::int64_t interval = config.tickIntervalSeconds * 1000;
  std::int64_t next_tick = (wall_ms() / interval + 1) * interval;
  while (!g_stop.load()) {
    rt.detector.ingest_items(channel.wait_and_drain(std::chrono::milliseconds(500)));
    const std::int64_t now = wall_ms();
    if (now >= next_tick) {
      rt.tick_and_save(now);
      next_tick = (now / interval + 1) * interval;
    }
  }
  rt.detector.ingest_items(channel.drain());
  rt.detector.save(rt.docs, rt.blobs);
  http.stop();
  return 0;
}

int cmd_tick(const Config& config, bool once, std::optional<std::int64_t> now, const std::string& logs) {
  Runtime rt(config);
  if (!logs.empty()) {
    for (const auto& r : read_records(logs)) rt.detector.ingest(r, "file");
  }
  if (once) {
    rt.tick_and_save(now.value_or(wall_ms()));
    return 0;
  }
  const std::int64_t interval = config.tickIntervalSeconds * 1000;
  while (!g_stop.load()) {
    rt.tick_and_save(wall_ms());
    const std::int64_t next = (wall_ms() / interval + 1) * interval;
    while (!g_stop.load() && wall_ms() < next) std::this_thread::sleep_for(std::chrono::milliseconds(200));
  }
  return 0;
}

int cmd_retrain(Config config, std::optional<std::int64_t> now) {
  config.retrainAsync = false;
  Runtime rt(config);
  const std::int64_t t = now.value_or(wall_ms());
  if (!rt.detector.has_model()) {
    rt.detector.train_initial(t);
  } else if (!rt.detector.request_retrain(t)) {
    std::cerr << "retrain not started\n";
    return 1;
  }
  rt.detector.save(rt.docs, rt.blobs);
  std::cout << json{{"modelVersion", rt.detector.model().modelVersion},
                    {"registryVersion", rt.detector.registry().version()},
                    {"columns", rt.detector.registry().column_count()}}
                   .dump()
            << '\n';
  return 0;
}

int cmd_replay(Config config, const std::string& file, std::optional<double> speed) {
  config.retrainAsync = false;
  Runtime rt(config);
  const std::int64_t wms = config.window_ms();
  std::int64_t current = -1;
  ingest::ReplayOptions options;
  options.speed = speed;
  auto stats = ingest::replay_file(file, options, [&](const ingest::LogRecord& r) {
    const std::int64_t w = features::window_of(r.timestamp, wms);
    if (current >= 0 && w > current) {
      try {
        for (const auto& a : rt.detector.tick(w)) std::cout << likelihood::to_json(a).dump() << '\n';
      } catch (const Error& e) {
        if (e.code() != ErrorCode::NoModel) throw;
      }
    }
    current = std::max(current, w);
    rt.detector.ingest(r, "replay");
  });
  if (current >= 0) rt.tick_and_save(current + wms);
  std::cerr << json{{"emitted", stats.emitted}, {"skipped", stats.skipped}}.dump() << '\n';
  return 0;
}

int cmd_eval(const std::string& stream, const std::string& truth_path, const std::string& config_path,
             const std::string& out_path, const std::string& csv_path) {
  const Config config = load_config(config_path, "");
  std::ifstream truth_in(truth_path);
  if (!truth_in) throw Error(ErrorCode::FileUnreadable, "cannot open " + truth_path);
  const auto truth = evalbench::ranges_from_json(json::parse(truth_in));
  const auto result = evalbench::evaluate_run(read_records(stream), truth, config);

  const std::string metrics = result.to_json().dump(2);
  if (out_path.empty()) {
    std::cout << metrics << '\n';
  } else {
    std::ofstream(out_path) << metrics << '\n';
  }
  std::ofstream csv(csv_path);
  if (!csv) throw Error(ErrorCode::FileUnreadable, "cannot write " + csv_path);
  csv << result.scores_csv(truth);
  return 0;
}

int cmd_generate(const std::string& spec_path, const std::vector<std::string>& injections, const std::string& out,
                 const std::string& truth_out) {
  evalbench::SyntheticSpec spec;
  if (!spec_path.empty()) {
    std::ifstream in(spec_path);
    if (!in) throw Error(ErrorCode::FileUnreadable, "cannot open " + spec_path);
    spec = evalbench::SyntheticSpec::from_json(json::parse(in));
  }
  std::vector<evalbench::Injection> list;
  for (const auto& text : injections) {
    // kind:start:duration[:magnitude]
    std::vector<std::string> parts;
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() < 3) throw Error(ErrorCode::InvalidConfig, "injection must be kind:start:duration[:magnitude]");
    evalbench::Injection inj;
    inj.kind = evalbench::injection_kind_from_string(parts[0]);
    inj.start = std::stoul(parts[1]);
    inj.duration = std::stoul(parts[2]);
    if (parts.size() > 3) inj.magnitude = std::stod(parts[3]);
    list.push_back(inj);
  }
  const auto stream = evalbench::generate_stream(spec, list);
  std::ofstream records(out);
  if (!records) throw Error(ErrorCode::FileUnreadable, "cannot write " + out);
  for (const auto& r : stream.records) records << ingest::serialize_log_record(r) << '\n';
  std::ofstream(truth_out) << evalbench::to_json(stream.truth).dump(2) << '\n';
  std::cerr << json{{"records", stream.records.size()}, {"windows", stream.windows}}.dump() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gruwatch: streaming anomaly detection over request telemetry"};
  app.require_subcommand(1);
  std::string config_path;
  std::string data_dir;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--data-dir", data_dir, "Directory for documents and blobs");

  auto* run = app.add_subcommand("run", "Resident service: HTTP API plus scheduled ticks and retrains");

  auto* tick = app.add_subcommand("tick", "Evaluate complete windows");
  bool once = false;
  std::optional<std::int64_t> tick_now;
  std::string tick_logs;
  tick->add_flag("--once", once, "Tick a single time and exit");
  tick->add_option("--now", tick_now, "Evaluation time in epoch ms (default: wall clock)");
  tick->add_option("--logs", tick_logs, "Newline-delimited JSON records to ingest first");

  auto* retrain = app.add_subcommand("retrain", "Retrain the model");
  bool retrain_now_flag = false;
  std::optional<std::int64_t> retrain_time;
  retrain->add_flag("--now", retrain_now_flag, "Retrain immediately")->required();
  retrain->add_option("--at", retrain_time, "Training timestamp in epoch ms (default: wall clock)");

  auto* replay = app.add_subcommand("replay", "Replay a recorded log file through the pipeline");
  std::string replay_file;
  std::optional<double> speed;
  replay->add_option("--file", replay_file, "Newline-delimited JSON records")->required()->check(CLI::ExistingFile);
  replay->add_option("--speed", speed, "Speed-up relative to record time (default: as fast as possible)")
      ->check(CLI::PositiveNumber);

  auto* eval = app.add_subcommand("eval", "Score a labeled stream end to end");
  std::string eval_stream, eval_truth, eval_config, eval_out, eval_csv = "scores.csv";
  eval->add_option("--stream", eval_stream, "Newline-delimited JSON records")->required()->check(CLI::ExistingFile);
  eval->add_option("--truth", eval_truth, "JSON array of {start, end} window indices")->required()->check(CLI::ExistingFile);
  eval->add_option("--config", eval_config, "Detector config")->check(CLI::ExistingFile);
  eval->add_option("--out", eval_out, "Metrics JSON path (default: stdout)");
  eval->add_option("--csv", eval_csv, "Per-window score CSV path")->capture_default_str();

  auto* generate = app.add_subcommand("generate", "Write a synthetic labeled stream");
  std::string gen_spec, gen_out = "stream.jsonl", gen_truth = "truth.json";
  std::vector<std::string> gen_inject;
  generate->add_option("--spec", gen_spec, "SyntheticSpec JSON");
  generate->add_option("--inject", gen_inject, "kind:start:duration[:magnitude], repeatable");
  generate->add_option("--out", gen_out, "Record output path");
  generate->add_option("--truth", gen_truth, "Truth output path");

  CLI11_PARSE(app, argc, argv);
  std::signal(SIGINT, on_signal);
  std::signal(SIGTERM, on_signal);

  try {
    if (*eval) return cmd_eval(eval_stream, eval_truth, eval_config.empty() ? config_path : eval_config, eval_out, eval_csv);
    if (*generate) return cmd_generate(gen_spec, gen_inject, gen_out, gen_truth);
    const Config config = load_config(config_path, data_dir);
    if (*run) return cmd_run(config);
    if (*tick) return cmd_tick(config, once, tick_now, tick_logs);
    if (*retrain) return cmd_retrain(config, retrain_time);
    if (*replay) return cmd_replay(config, replay_file, speed);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
