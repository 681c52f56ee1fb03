// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/evalbench/confusion.hpp"

#include <algorithm>

#include "gruwatch/error.hpp"

namespace gruwatch::evalbench {

using nlohmann::json;

std::vector<std::int64_t> ranges_to_points(std::span<const LabeledRange> ranges) {
  std::vector<std::int64_t> points;
  for (const auto& r : ranges) {
    if (r.start > r.end) {
      throw Error(ErrorCode::InvalidRange, "range start " + std::to_string(r.start) + " > end " + std::to_string(r.end));
    }
    for (std::int64_t i = r.start; i <= r.end; ++i) points.push_back(i);
  }
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

ConfusionMatrix confusion(std::span<const std::int64_t> predicted, std::span<const LabeledRange> truth,
                          std::int64_t total_points) {
  auto truth_points = ranges_to_points(truth);
  std::vector<std::int64_t> pred(predicted.begin(), predicted.end());
  std::sort(pred.begin(), pred.end());
  pred.erase(std::unique(pred.begin(), pred.end()), pred.end());
  auto out_of_range = [&](std::int64_t i) { return i < 0 || i >= total_points; };
  if (!pred.empty() && (out_of_range(pred.front()) || out_of_range(pred.back()))) {
    throw Error(ErrorCode::IndexOutOfRange, "predicted index outside [0, " + std::to_string(total_points) + ")");
  }
  if (!truth_points.empty() && (out_of_range(truth_points.front()) || out_of_range(truth_points.back()))) {
    throw Error(ErrorCode::IndexOutOfRange, "truth index outside [0, " + std::to_string(total_points) + ")");
  }
  std::vector<std::int64_t> both;
  std::set_intersection(pred.begin(), pred.end(), truth_points.begin(), truth_points.end(), std::back_inserter(both));
  ConfusionMatrix cm;
  cm.tp = both.size();
  cm.fp = pred.size() - both.size();
  cm.fn = truth_points.size() - both.size();
  cm.tn = static_cast<std::uint64_t>(total_points) - cm.tp - cm.fp - cm.fn;
  return cm;
}

MetricsReport metrics(const ConfusionMatrix& cm) {
  if (cm.total() == 0) throw Error(ErrorCode::EmptyMatrix, "confusion matrix has no points");
  MetricsReport m;
  const auto tp = static_cast<double>(cm.tp);
  m.accuracy = static_cast<double>(cm.tp + cm.tn) / static_cast<double>(cm.total());
  if (cm.tp + cm.fp == 0) {
    m.warnings.emplace_back("precision undefined (no predicted positives), reported as 0");
  } else {
    m.precision = tp / static_cast<double>(cm.tp + cm.fp);
  }
  if (cm.tp + cm.fn == 0) {
    m.warnings.emplace_back("recall undefined (no true positives in truth), reported as 0");
  } else {
    m.recall = tp / static_cast<double>(cm.tp + cm.fn);
  }
  const double pr = m.precision + m.recall;
  m.f1 = pr > 0.0 ? 2.0 * m.precision * m.recall / pr : 0.0;
  return m;
}

json to_json(const ConfusionMatrix& cm) {
  return json{{"tp", cm.tp}, {"fp", cm.fp}, {"fn", cm.fn}, {"tn", cm.tn}};
}

json to_json(const MetricsReport& m) {
  return json{{"accuracy", m.accuracy},
              {"precision", m.precision},
              {"recall", m.recall},
              {"f1", m.f1},
              {"warnings", m.warnings}};
}

json to_json(std::span<const LabeledRange> ranges) {
  json out = json::array();
  for (const auto& r : ranges) out.push_back({{"start", r.start}, {"end", r.end}});
  return out;
}

std::vector<LabeledRange> ranges_from_json(const json& j) {
  if (!j.is_array()) throw Error(ErrorCode::MalformedJson, "truth must be a JSON array");
  std::vector<LabeledRange> out;
  for (const auto& r : j) {
    if (!r.is_object() || !r.contains("start") || !r.contains("end") || !r["start"].is_number_integer() ||
        !r["end"].is_number_integer()) {
      throw Error(ErrorCode::MalformedJson, "truth entries need integer start and end");
    }
    LabeledRange range{r["start"].get<std::int64_t>(), r["end"].get<std::int64_t>()};
    if (range.start > range.end) throw Error(ErrorCode::InvalidRange, "truth range with start > end");
    out.push_back(range);
  }
  return out;
}

}  // namespace gruwatch::evalbench
