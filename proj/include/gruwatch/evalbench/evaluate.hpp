// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "gruwatch/config.hpp"
#include "gruwatch/evalbench/confusion.hpp"
#include "gruwatch/ingest/log_record.hpp"

namespace gruwatch::evalbench {

inline constexpr std::int64_t kDetectionTickBudget = 2;

struct WindowScore {
  std::size_t index = 0;
  std::int64_t windowStart = 0;
  bool scored = false;  // false for training windows and skipped windows
  double mse = 0.0;
  double likelihood = 0.0;
  bool flagged = false;
  std::string policy;
};

struct RangeDetection {
  LabeledRange range;
  std::optional<std::int64_t> firstFlag;  // window index
  std::optional<std::int64_t> latencyTicks;
  bool detected = false;  // flagged no later than the tick budget after the range start
};

struct EvalResult {
  std::size_t totalWindows = 0;
  std::size_t trainingWindows = 0;
  std::size_t warmupWindows = 0;
  ConfusionMatrix cm;
  MetricsReport metrics;
  std::vector<RangeDetection> detections;
  double rangeRecall = 0.0;
  std::size_t falsePositiveWindows = 0;  // after training and warm-up
  std::size_t negativeWindows = 0;       // after training and warm-up
  double falsePositiveRate = 0.0;
  std::vector<WindowScore> scores;
  double seconds = 0.0;

  nlohmann::json to_json() const;
  /// index,windowStart,scored,mse,likelihood,flagged,policy,truth
  std::string scores_csv(const std::vector<LabeledRange>& truth) const;
};

/// Runs the whole pipeline over a recorded stream: the first windows (per the
/// initial-training rule) train the model, every later window is scored on
/// its own tick. Window indices count from `start_ms` (default: the window of
/// the first record); `total_windows` defaults to the span of the records.
EvalResult evaluate_run(std::vector<ingest::LogRecord> records, const std::vector<LabeledRange>& truth,
                        const Config& config, std::optional<std::int64_t> start_ms = std::nullopt,
                        std::optional<std::size_t> total_windows = std::nullopt);

}  // namespace gruwatch::evalbench
