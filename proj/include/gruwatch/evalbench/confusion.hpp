// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace gruwatch::evalbench {

/// Inclusive [start, end] point indices of a true anomaly.
struct LabeledRange {
  std::int64_t start = 0;
  std::int64_t end = 0;

  std::int64_t length() const { return end - start + 1; }
  bool operator==(const LabeledRange&) const = default;
};

struct ConfusionMatrix {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t fn = 0;
  std::uint64_t tn = 0;

  std::uint64_t total() const { return tp + fp + fn + tn; }
  bool operator==(const ConfusionMatrix&) const = default;
};

struct MetricsReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::vector<std::string> warnings;  // set when precision or recall is undefined
};

/// Sorted, de-duplicated union of the inclusive ranges. Throws InvalidRange.
std::vector<std::int64_t> ranges_to_points(std::span<const LabeledRange> ranges);

/// Point-wise confusion of `predicted` against the ranges over
/// [0, total_points). Throws IndexOutOfRange.
ConfusionMatrix confusion(std::span<const std::int64_t> predicted, std::span<const LabeledRange> truth,
                          std::int64_t total_points);

/// Throws EmptyMatrix.
MetricsReport metrics(const ConfusionMatrix& cm);

nlohmann::json to_json(const ConfusionMatrix& cm);
nlohmann::json to_json(const MetricsReport& m);
nlohmann::json to_json(std::span<const LabeledRange> ranges);
/// A JSON array of {start, end}. Throws MalformedJson or InvalidRange.
std::vector<LabeledRange> ranges_from_json(const nlohmann::json& j);

}  // namespace gruwatch::evalbench
