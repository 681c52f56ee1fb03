// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "gruwatch/config.hpp"
#include "gruwatch/features/registry.hpp"
#include "gruwatch/ingest/intake.hpp"
#include "gruwatch/likelihood/likelihood.hpp"
#include "gruwatch/model/gru_autoencoder.hpp"
#include "gruwatch/orchestrator/event_log.hpp"
#include "gruwatch/orchestrator/unseen.hpp"
#include "gruwatch/orchestrator/window_store.hpp"
#include "gruwatch/store/blob_store.hpp"
#include "gruwatch/store/document_store.hpp"

namespace gruwatch::orchestrator {

struct DetectorCounters {
  std::uint64_t ticks = 0;
  std::uint64_t assessments = 0;
  std::uint64_t skippedWindows = 0;
  std::uint64_t tickFailures = 0;
  std::uint64_t staleRescored = 0;
  std::uint64_t windowsTooOld = 0;
  std::uint64_t retrains = 0;
  std::uint64_t retrainFailures = 0;
  std::uint64_t onlineSteps = 0;

  nlohmann::json to_json() const;
  static DetectorCounters from_json(const nlohmann::json& j);
};

/// A registry and the model trained against it, published together.
struct TrainedPair {
  features::FeatureRegistry registry;
  model::GruAutoencoder model;
  double initialLoss = 0.0;
  double finalLoss = 0.0;
};

/// Trains a fresh (registry, model) pair on the given windows. Pure; runs on
/// whichever thread calls it.
TrainedPair train_pair(const std::vector<features::AggregationWindow>& windows, const Config& config,
                       std::int64_t previous_registry_version, std::int64_t previous_model_version,
                       std::int64_t now);

/// The detection lifecycle for one telemetry stream.
///
/// All methods except the retrain worker run on one scoring thread. The
/// worker only reads its own snapshot and hands a finished TrainedPair back
/// through a mutex-guarded slot, which the scoring thread installs between
/// ticks.
class Detector {
 public:
  using AssessmentSink = std::function<void(const likelihood::AnomalyAssessment&)>;

  Detector(Config config, EventLog& events);
  ~Detector();
  Detector(const Detector&) = delete;
  Detector& operator=(const Detector&) = delete;

  const Config& config() const { return config_; }
  void set_sink(AssessmentSink sink) { sink_ = std::move(sink); }
  /// Runs on the retrain worker before training starts.
  void set_retrain_gate(std::function<void()> gate) { gate_ = std::move(gate); }

  /// Buffers a record. Records for already-scored windows go through
  /// handle_stale; those beyond retention are counted and dropped.
  void ingest(const ingest::LogRecord& record, const std::string& source = {});
  void ingest_items(const std::vector<ingest::IntakeItem>& items);

  /// Re-aggregates and re-scores the record's window immediately.
  /// Throws WindowTooOld beyond the retention horizon.
  std::vector<likelihood::AnomalyAssessment> handle_stale(const ingest::LogRecord& record,
                                                          const std::string& source = {});

  /// Closes every window that ended at or before `now`.
  void close_windows(std::int64_t now);

  /// Trains the first model on the earliest `rows` closed windows; by default
  /// the initial-training rule applied to all closed windows. Windows after
  /// the training prefix are scored by the next tick.
  void train_initial(std::int64_t now, std::optional<std::size_t> rows = std::nullopt);

  /// Installs a finished retrain, closes complete windows, re-scores stale
  /// windows, scores every newly closed window in order and schedules a
  /// retrain when due. Throws NoModel when no model exists and too few
  /// windows are available to train one.
  std::vector<likelihood::AnomalyAssessment> tick(std::int64_t now);

  /// Starts a retrain over the latest training horizon. Returns false when
  /// one is already running or there is no model yet.
  bool request_retrain(std::int64_t now);
  bool retrain_running() const { return running_.load(); }
  /// Blocks until the worker finishes or the timeout passes.
  bool wait_for_retrain(std::chrono::milliseconds timeout);
  /// Publishes a finished retrain. Returns true when a swap happened.
  bool install_pending(std::int64_t now);

  bool has_model() const { return hasModel_; }
  const features::FeatureRegistry& registry() const { return registry_; }
  const model::GruAutoencoder& model() const { return model_; }
  const likelihood::ErrorDistributionState& likelihood_state() const { return likelihood_; }
  const WindowStore& windows() const { return windows_; }
  const UnseenAccumulator& unseen() const { return unseen_; }
  const DetectorCounters& counters() const { return counters_; }
  const std::map<std::int64_t, std::vector<likelihood::AnomalyAssessment>>& assessments() const {
    return assessments_;
  }
  std::optional<likelihood::AnomalyAssessment> latest_assessment(std::int64_t window_start) const;

  std::optional<std::int64_t> last_closed() const { return lastClosed_; }
  std::optional<std::int64_t> last_scored() const { return lastScored_; }
  std::int64_t last_tick() const { return lastTick_; }
  std::int64_t last_retrain() const { return lastRetrain_; }

  /// Persists registry, likelihood state and schedule as documents; model,
  /// window frames and raw records as blobs.
  void save(store::DocumentStore& docs, store::BlobStore& blobs);
  /// Returns false when no saved state exists.
  bool load(const store::DocumentStore& docs, const store::BlobStore& blobs);

 private:
  std::optional<likelihood::AnomalyAssessment> score_window(std::int64_t start, std::int64_t now);
  std::optional<likelihood::AnomalyAssessment> rescore_window(std::int64_t start, std::int64_t now);
  model::Matrix sample_for(std::int64_t start) const;
  std::size_t preceding_empty(std::int64_t start) const;
  std::size_t closed_count() const;
  void publish(TrainedPair pair, std::int64_t now, bool fresh_likelihood);
  void record(const likelihood::AnomalyAssessment& a);
  void observe_unseen(const std::vector<features::FeatureKey>& keys, std::int64_t now);
  void prune();
  void join_worker();

  Config config_;
  EventLog& events_;
  WindowStore windows_;
  UnseenAccumulator unseen_;

  bool hasModel_ = false;
  features::FeatureRegistry registry_;
  model::GruAutoencoder model_;
  likelihood::ErrorDistributionState likelihood_;

  std::map<std::int64_t, std::vector<likelihood::AnomalyAssessment>> assessments_;
  std::vector<std::string> unsaved_;
  std::set<std::int64_t> dirty_;
  std::optional<std::int64_t> lastClosed_;
  std::optional<std::int64_t> lastScored_;
  std::optional<std::int64_t> firstScored_;
  std::int64_t lastTick_ = 0;
  std::int64_t lastRetrain_ = 0;
  DetectorCounters counters_;

  AssessmentSink sink_;
  std::function<void()> gate_;

  std::thread worker_;
  std::atomic<bool> running_{false};
  mutable std::mutex pendingMutex_;
  std::condition_variable pendingReady_;
  std::optional<TrainedPair> pending_;
  std::optional<std::string> pendingError_;
};

}  // namespace gruwatch::orchestrator
