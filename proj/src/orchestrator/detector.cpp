// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/orchestrator/detector.hpp"

#include <algorithm>

#include "gruwatch/error.hpp"
#include "gruwatch/features/vector_builder.hpp"
#include "gruwatch/likelihood/ranking.hpp"
#include "gruwatch/model/trainer.hpp"

namespace gruwatch::orchestrator {

using features::AggregationWindow;
using likelihood::AnomalyAssessment;
using nlohmann::json;

namespace {

model::Matrix normalized_rows(const std::vector<AggregationWindow>& windows,
                              const features::FeatureRegistry& registry) {
  model::Matrix rows(windows.size(), registry.column_count());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    const auto v = features::build_vector(windows[i], registry, 0).values;
    std::copy(v.begin(), v.end(), rows.row(i).begin());
  }
  return rows;
}

}  // namespace

TrainedPair train_pair(const std::vector<AggregationWindow>& windows, const Config& config,
                       std::int64_t previous_registry_version, std::int64_t previous_model_version,
                       std::int64_t now) {
  TrainedPair out;
  out.registry = features::register_features(windows, previous_registry_version);
  const model::Matrix rows = normalized_rows(windows, out.registry);

  model::TrainingConfig chosen = config.training;
  if (!config.grid.empty()) {
    const std::size_t split = rows.rows * 4 / 5;
    const std::size_t validation = rows.rows - split;
    std::size_t min_lookback = 0;
    for (const auto& g : config.grid) min_lookback = std::max(min_lookback, g.lookback);
    if (split > min_lookback && validation >= min_lookback) {
      chosen = model::grid_search(config.grid, rows.slice(0, split), rows.slice(split, validation)).best;
    }
  }
  auto result = model::train_batch(model::init_model(chosen, out.registry, chosen.seed), rows, chosen);
  out.model = std::move(result.model);
  out.model.registryVersion = out.registry.version();
  out.model.modelVersion = previous_model_version + 1;
  out.model.trainedAt = now;
  out.initialLoss = result.initialLoss;
  out.finalLoss = result.lossCurve.empty() ? result.initialLoss : result.lossCurve.back();
  if (!out.model.all_finite()) throw Error(ErrorCode::RetrainFailed, "training produced non-finite weights");
  return out;
}

Detector::Detector(Config config, EventLog& events)
    : config_(std::move(config)),
      events_(events),
      windows_(config_.window_ms(), config_.perSourceKeys),
      likelihood_(config_.likelihood) {
  config_.validate();
}

Detector::~Detector() { join_worker(); }

void Detector::join_worker() {
  if (worker_.joinable()) worker_.join();
}

void Detector::ingest(const ingest::LogRecord& record, const std::string& source) {
  const std::int64_t w = features::window_of(record.timestamp, config_.window_ms());
  if (lastClosed_ && w <= *lastClosed_) {
    try {
      handle_stale(record, source);
    } catch (const Error& e) {
      if (e.code() != ErrorCode::WindowTooOld) throw;
    }
    return;
  }
  windows_.add(record, source);
}

void Detector::ingest_items(const std::vector<ingest::IntakeItem>& items) {
  for (const auto& item : items) ingest(item.record, item.sourceId);
}

std::vector<AnomalyAssessment> Detector::handle_stale(const ingest::LogRecord& record, const std::string& source) {
  const std::int64_t w = features::window_of(record.timestamp, config_.window_ms());
  const std::int64_t reference = std::max(lastTick_, lastClosed_.value_or(w) + config_.window_ms());
  if (reference - w > config_.retention_ms()) {
    ++counters_.windowsTooOld;
    events_.emit("window_too_old", "warning", lastTick_, {{"windowStart", w}, {"appName", record.appName}});
    throw Error(ErrorCode::WindowTooOld, "window " + std::to_string(w) + " is beyond the retention horizon");
  }
  windows_.add(record, source);
  if (!lastClosed_ || w > *lastClosed_) return {};
  windows_.close(w);

  std::vector<AnomalyAssessment> out;
  if (hasModel_ && firstScored_ && lastScored_ && w >= *firstScored_ && w <= *lastScored_) {
    if (auto a = rescore_window(w, lastTick_)) out.push_back(*a);
    dirty_.erase(w);
  }
  return out;
}

void Detector::close_windows(std::int64_t now) {
  const std::int64_t wms = config_.window_ms();
  std::optional<std::int64_t> start;
  if (lastClosed_) {
    start = *lastClosed_ + wms;
  } else {
    start = windows_.earliest();
  }
  if (!start) return;
  for (std::int64_t s = *start; s + wms <= now; s += wms) {
    windows_.close(s);
    lastClosed_ = s;
  }
}

std::size_t Detector::closed_count() const {
  auto first = windows_.earliest();
  if (!first || !lastClosed_ || *lastClosed_ < *first) return 0;
  return static_cast<std::size_t>((*lastClosed_ - *first) / config_.window_ms()) + 1;
}

void Detector::train_initial(std::int64_t now, std::optional<std::size_t> rows) {
  close_windows(now);
  const std::size_t available = closed_count();
  const std::size_t L = config_.training.lookback;
  const std::size_t n = rows.value_or(model::initial_training_rows(available, L));
  if (n > available || n < L + 1) {
    throw Error(ErrorCode::InsufficientData, std::to_string(available) + " closed windows, " + std::to_string(n) +
                                                 " requested, lookback " + std::to_string(L));
  }
  const std::int64_t first = *windows_.earliest();
  const std::int64_t last = first + static_cast<std::int64_t>(n - 1) * config_.window_ms();
  auto snapshot = windows_.range(first, last);

  join_worker();
  TrainedPair pair = train_pair(snapshot, config_, registry_.version(), hasModel_ ? model_.modelVersion : 0, now);
  events_.emit("initial_training", "info", now,
               {{"windows", n},
                {"columns", pair.registry.column_count()},
                {"initialLoss", pair.initialLoss},
                {"finalLoss", pair.finalLoss}});
  publish(std::move(pair), now, /*fresh_likelihood=*/true);
  lastRetrain_ = now;
  lastScored_ = last;
  firstScored_ = last + config_.window_ms();
  dirty_.clear();
}

void Detector::publish(TrainedPair pair, std::int64_t now, bool fresh_likelihood) {
  if (pair.model.registryVersion != pair.registry.version()) {
    throw Error(ErrorCode::RetrainFailed, "model and registry versions disagree");
  }
  registry_ = std::move(pair.registry);
  model_ = std::move(pair.model);
  model_.set_learning_rate(config_.onlineLearningRate);
  hasModel_ = true;
  if (fresh_likelihood) likelihood_ = likelihood::ErrorDistributionState(config_.likelihood);
  unseen_.absorb(registry_);
  events_.emit("model_published", "info", now,
               {{"modelVersion", model_.modelVersion}, {"registryVersion", registry_.version()},
                {"columns", registry_.column_count()}});
}

std::size_t Detector::preceding_empty(std::int64_t start) const {
  const std::int64_t wms = config_.window_ms();
  const auto earliest = windows_.earliest();
  std::size_t n = 0;
  for (std::int64_t s = start - wms; earliest && s >= *earliest && n < config_.skipAfterEmptyWindows; s -= wms) {
    if (!windows_.is_empty(s)) break;
    ++n;
  }
  return n;
}

model::Matrix Detector::sample_for(std::int64_t start) const {
  const std::size_t L = model_.lookback();
  const std::int64_t first = start - static_cast<std::int64_t>(L - 1) * config_.window_ms();
  return normalized_rows(windows_.range(first, start), registry_);
}

void Detector::observe_unseen(const std::vector<features::FeatureKey>& keys, std::int64_t now) {
  if (keys.empty()) return;
  unseen_.observe(keys, now);
  for (const auto& w : unseen_.emit_unseen_warnings()) {
    events_.emit("unseen_feature", w.priority == WarningPriority::High ? "error" : "warning", now, w.to_json());
  }
}

std::optional<AnomalyAssessment> Detector::score_window(std::int64_t start, std::int64_t now) {
  const AggregationWindow agg = windows_.window(start);
  const auto vec = features::build_vector(agg, registry_, preceding_empty(start),
                                          features::MissingDataPolicy{config_.skipAfterEmptyWindows});
  observe_unseen(vec.unseenKeys, now);
  if (vec.policy != features::PredictionPolicy::Predict) {
    events_.emit("missing_data", "warning", now,
                 {{"windowStart", start}, {"policy", features::to_string(vec.policy)}});
  }
  if (vec.policy == features::PredictionPolicy::SkipWithWarning) {
    ++counters_.skippedWindows;
    return std::nullopt;
  }

  const model::Matrix sample = sample_for(start);
  const auto err = model::reconstruction_error(sample, model_.forward(sample));

  AnomalyAssessment a;
  a.windowStart = start;
  a.windowEnd = start + config_.window_ms();
  a.registryVersion = registry_.version();
  a.modelVersion = model_.modelVersion;
  a.mse = err.mse;
  a.perFeature = err.perFeature;
  a.likelihood = likelihood_.update_and_score(err.mse);
  a.flagged = !likelihood_.warming_up() && likelihood::flag(a.likelihood, config_.likelihood.threshold);
  a.policy = vec.policy;
  a.topAnomalousFeatures = likelihood::anomalous_keys(err.perFeature, registry_);
  auto chain = assessments_.find(start);
  a.revision = chain == assessments_.end() ? 0 : static_cast<std::int64_t>(chain->second.size());

  if (config_.onlineLearningRate > 0.0) {
    model_ = model::online_step(model_, sample);
    ++counters_.onlineSteps;
  }
  record(a);
  return a;
}

std::optional<AnomalyAssessment> Detector::rescore_window(std::int64_t start, std::int64_t now) {
  const auto vec = features::build_vector(windows_.window(start), registry_, preceding_empty(start),
                                          features::MissingDataPolicy{config_.skipAfterEmptyWindows});
  observe_unseen(vec.unseenKeys, now);
  if (vec.policy == features::PredictionPolicy::SkipWithWarning) return std::nullopt;

  const model::Matrix sample = sample_for(start);
  const auto err = model::reconstruction_error(sample, model_.forward(sample));

  AnomalyAssessment a;
  a.windowStart = start;
  a.windowEnd = start + config_.window_ms();
  a.registryVersion = registry_.version();
  a.modelVersion = model_.modelVersion;
  a.mse = err.mse;
  a.perFeature = err.perFeature;
  a.likelihood = likelihood_.score_candidate(err.mse);
  a.flagged = likelihood_.observations() + 1 >= likelihood_.short_window() &&
              likelihood::flag(a.likelihood, config_.likelihood.threshold);
  a.policy = vec.policy;
  a.topAnomalousFeatures = likelihood::anomalous_keys(err.perFeature, registry_);
  auto chain = assessments_.find(start);
  a.revision = chain == assessments_.end() ? 0 : static_cast<std::int64_t>(chain->second.size());
  ++counters_.staleRescored;
  events_.emit("stale_rescored", "info", now,
               {{"windowStart", start}, {"revision", a.revision}, {"flagged", a.flagged}});
  record(a);
  return a;
}

void Detector::record(const AnomalyAssessment& a) {
  assessments_[a.windowStart].push_back(a);
  unsaved_.push_back(a.key());
  ++counters_.assessments;
  if (sink_) sink_(a);
}

std::optional<AnomalyAssessment> Detector::latest_assessment(std::int64_t window_start) const {
  auto it = assessments_.find(window_start);
  if (it == assessments_.end() || it->second.empty()) return std::nullopt;
  return it->second.back();
}

std::vector<AnomalyAssessment> Detector::tick(std::int64_t now) {
  lastTick_ = std::max(lastTick_, now);
  ++counters_.ticks;
  install_pending(now);
  close_windows(now);

  if (!hasModel_) {
    if (closed_count() < config_.retrainMinWindows) {
      throw Error(ErrorCode::NoModel, std::to_string(closed_count()) + " of " +
                                          std::to_string(config_.retrainMinWindows) +
                                          " windows needed before the first model");
    }
    train_initial(now);
  }

  std::vector<AnomalyAssessment> out;
  for (std::int64_t w : std::vector<std::int64_t>(dirty_.begin(), dirty_.end())) {
    try {
      if (auto a = rescore_window(w, now)) out.push_back(*a);
    } catch (const std::exception& e) {
      ++counters_.tickFailures;
      events_.emit("tick_failure", "error", now, {{"windowStart", w}, {"error", e.what()}});
    }
  }
  dirty_.clear();

  if (lastClosed_ && lastScored_) {
    for (std::int64_t s = *lastScored_ + config_.window_ms(); s <= *lastClosed_; s += config_.window_ms()) {
      try {
        if (auto a = score_window(s, now)) out.push_back(*a);
      } catch (const std::exception& e) {
        ++counters_.tickFailures;
        events_.emit("tick_failure", "error", now, {{"windowStart", s}, {"error", e.what()}});
      }
      lastScored_ = s;
    }
  }

  if (config_.retrainIntervalHours > 0.0 && now - lastRetrain_ >= config_.retrain_interval_ms()) {
    request_retrain(now);
  }
  prune();
  return out;
}

bool Detector::request_retrain(std::int64_t now) {
  if (!hasModel_ || running_.load() || !lastClosed_) return false;
  const std::int64_t wms = config_.window_ms();
  const std::int64_t horizon_first = *lastClosed_ - static_cast<std::int64_t>(config_.retrainHorizonWindows - 1) * wms;
  const std::int64_t first = std::max(horizon_first, windows_.earliest().value_or(*lastClosed_));
  auto snapshot = windows_.range(first, *lastClosed_);
  lastRetrain_ = now;
  if (snapshot.size() < config_.training.lookback + 1) {
    ++counters_.retrainFailures;
    events_.emit("retrain_failed", "warning", now, {{"error", "not enough windows in the training horizon"}});
    return false;
  }
  events_.emit("retrain_started", "info", now, {{"windows", snapshot.size()}, {"async", config_.retrainAsync}});

  const std::int64_t reg_version = registry_.version();
  const std::int64_t model_version = model_.modelVersion;
  auto job = [this, snapshot = std::move(snapshot), reg_version, model_version, now] {
    std::optional<TrainedPair> result;
    std::optional<std::string> failure;
    try {
      if (gate_) gate_();
      result = train_pair(snapshot, config_, reg_version, model_version, now);
    } catch (const std::exception& e) {
      failure = e.what();
    }
    {
      std::lock_guard lock(pendingMutex_);
      pending_ = std::move(result);
      pendingError_ = std::move(failure);
      running_.store(false);
    }
    pendingReady_.notify_all();
  };

  join_worker();
  running_.store(true);
  if (config_.retrainAsync) {
    worker_ = std::thread(std::move(job));
  } else {
    job();
    install_pending(now);
  }
  return true;
}

bool Detector::wait_for_retrain(std::chrono::milliseconds timeout) {
  std::unique_lock lock(pendingMutex_);
  return pendingReady_.wait_for(lock, timeout, [this] { return !running_.load(); });
}

bool Detector::install_pending(std::int64_t now) {
  std::optional<TrainedPair> pair;
  std::optional<std::string> failure;
  {
    std::lock_guard lock(pendingMutex_);
    pair.swap(pending_);
    failure.swap(pendingError_);
  }
  if (failure) {
    ++counters_.retrainFailures;
    events_.emit("retrain_failed", "warning", now,
                 {{"error", *failure}, {"modelVersion", model_.modelVersion}});
  }
  if (!pair) return false;
  events_.emit("retrain_completed", "info", now,
               {{"initialLoss", pair->initialLoss}, {"finalLoss", pair->finalLoss}});
  publish(std::move(*pair), now, /*fresh_likelihood=*/false);
  ++counters_.retrains;
  return true;
}

void Detector::prune() {
  if (!lastClosed_) return;
  const std::int64_t wms = config_.window_ms();
  const std::int64_t keep_windows =
      static_cast<std::int64_t>(std::max(config_.retrainHorizonWindows, config_.retrainMinWindows)) +
      static_cast<std::int64_t>(config_.training.lookback);
  const std::int64_t raw_before = *lastClosed_ + wms - config_.retention_ms();
  windows_.prune(raw_before, *lastClosed_ - keep_windows * wms);
  assessments_.erase(assessments_.begin(), assessments_.lower_bound(raw_before));
}

}  // namespace gruwatch::orchestrator
