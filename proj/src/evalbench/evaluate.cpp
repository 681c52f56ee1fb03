// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/evalbench/evaluate.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include "gruwatch/error.hpp"
#include "gruwatch/features/vector_builder.hpp"
#include "gruwatch/model/trainer.hpp"
#include "gruwatch/orchestrator/detector.hpp"

namespace gruwatch::evalbench {

using nlohmann::json;

json EvalResult::to_json() const {
  json ranges = json::array();
  for (const auto& d : detections) {
    ranges.push_back({{"start", d.range.start},
                      {"end", d.range.end},
                      {"firstFlag", d.firstFlag ? json(*d.firstFlag) : json(nullptr)},
                      {"latencyTicks", d.latencyTicks ? json(*d.latencyTicks) : json(nullptr)},
                      {"detected", d.detected}});
  }
  return json{{"totalWindows", totalWindows},
              {"trainingWindows", trainingWindows},
              {"warmupWindows", warmupWindows},
              {"confusion", evalbench::to_json(cm)},
              {"metrics", evalbench::to_json(metrics)},
              {"rangeRecall", rangeRecall},
              {"falsePositiveWindows", falsePositiveWindows},
              {"negativeWindows", negativeWindows},
              {"falsePositiveRate", falsePositiveRate},
              {"ranges", ranges},
              {"seconds", seconds}};
}

std::string EvalResult::scores_csv(const std::vector<LabeledRange>& truth) const {
  const auto truth_points = ranges_to_points(truth);
  std::ostringstream out;
  out.precision(10);
  out << "index,windowStart,scored,mse,likelihood,flagged,policy,truth\n";
  for (const auto& s : scores) {
    const bool is_truth = std::binary_search(truth_points.begin(), truth_points.end(), static_cast<std::int64_t>(s.index));
    out << s.index << ',' << s.windowStart << ',' << (s.scored ? 1 : 0) << ',' << s.mse << ',' << s.likelihood << ','
        << (s.flagged ? 1 : 0) << ',' << s.policy << ',' << (is_truth ? 1 : 0) << '\n';
  }
  return out.str();
}

EvalResult evaluate_run(std::vector<ingest::LogRecord> records, const std::vector<LabeledRange>& truth,
                        const Config& config, std::optional<std::int64_t> start_ms,
                        std::optional<std::size_t> total_windows) {
  const auto t0 = std::chrono::steady_clock::now();
  if (records.empty()) throw Error(ErrorCode::InsufficientData, "evaluation stream has no records");
  std::stable_sort(records.begin(), records.end(),
                   [](const auto& a, const auto& b) { return a.timestamp < b.timestamp; });

  Config cfg = config;
  cfg.retrainAsync = false;
  const std::int64_t wms = cfg.window_ms();
  const std::int64_t start = start_ms.value_or(features::window_of(records.front().timestamp, wms));
  const std::size_t total = total_windows.value_or(
      static_cast<std::size_t>((features::window_of(records.back().timestamp, wms) - start) / wms) + 1);

  EvalResult result;
  result.totalWindows = total;
  result.trainingWindows = model::initial_training_rows(total, cfg.training.lookback);
  result.warmupWindows = std::min(cfg.evalWarmupWindows, total - result.trainingWindows);
  result.scores.resize(total);
  for (std::size_t i = 0; i < total; ++i) {
    result.scores[i].index = i;
    result.scores[i].windowStart = start + static_cast<std::int64_t>(i) * wms;
  }

  orchestrator::EventLog events(nullptr, 1000);
  orchestrator::Detector detector(cfg, events);
  std::size_t next = 0;
  auto feed_until = [&](std::int64_t end) {
    while (next < records.size() && records[next].timestamp < end) {
      if (records[next].timestamp >= start) detector.ingest(records[next]);
      ++next;
    }
  };

  const std::int64_t train_end = start + static_cast<std::int64_t>(result.trainingWindows) * wms;
  feed_until(train_end);
  // An explicit empty first window anchors window indices at `start`.
  detector.close_windows(train_end);
  if (!detector.windows().earliest() || *detector.windows().earliest() != start) {
    throw Error(ErrorCode::InsufficientData, "the first evaluation window has no records");
  }
  detector.train_initial(train_end, result.trainingWindows);

  for (std::size_t i = result.trainingWindows; i < total; ++i) {
    const std::int64_t end = start + static_cast<std::int64_t>(i + 1) * wms;
    feed_until(end);
    for (const auto& a : detector.tick(end)) {
      const auto idx = static_cast<std::size_t>((a.windowStart - start) / wms);
      if (idx >= total) continue;
      auto& s = result.scores[idx];
      s.scored = true;
      s.mse = a.mse;
      s.likelihood = a.likelihood;
      s.flagged = a.flagged;
      s.policy = std::string(features::to_string(a.policy));
    }
    if (!result.scores[i].scored) result.scores[i].policy = "SkipWithWarning";
  }

  std::vector<std::int64_t> predicted;
  for (const auto& s : result.scores) {
    if (s.flagged) predicted.push_back(static_cast<std::int64_t>(s.index));
  }
  result.cm = confusion(predicted, truth, static_cast<std::int64_t>(total));
  result.metrics = metrics(result.cm);

  std::size_t detected = 0;
  for (const auto& r : truth) {
    RangeDetection d{r, std::nullopt, std::nullopt, false};
    for (auto i = r.start; i <= r.end + kDetectionTickBudget && i < static_cast<std::int64_t>(total); ++i) {
      if (i >= 0 && result.scores[static_cast<std::size_t>(i)].flagged) {
        d.firstFlag = i;
        d.latencyTicks = i - r.start;
        break;
      }
    }
    d.detected = d.latencyTicks && *d.latencyTicks <= kDetectionTickBudget;
    detected += d.detected ? 1 : 0;
    result.detections.push_back(d);
  }
  result.rangeRecall = truth.empty() ? 0.0 : static_cast<double>(detected) / static_cast<double>(truth.size());

  const auto truth_points = ranges_to_points(truth);
  for (std::size_t i = result.trainingWindows + result.warmupWindows; i < total; ++i) {
    if (std::binary_search(truth_points.begin(), truth_points.end(), static_cast<std::int64_t>(i))) continue;
    ++result.negativeWindows;
    if (result.scores[i].flagged) ++result.falsePositiveWindows;
  }
  result.falsePositiveRate = result.negativeWindows == 0 ? 0.0
                                                         : static_cast<double>(result.falsePositiveWindows) /
                                                               static_cast<double>(result.negativeWindows);
  result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return result;
}

}  // namespace gruwatch::evalbench
