// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include <json.hpp>

#include "gruwatch/features/vector_builder.hpp"
#include "gruwatch/features/window.hpp"

namespace gruwatch::likelihood {

inline constexpr double kDefaultThreshold = 0.9602;
inline constexpr double kSigmaFloor = 1e-9;

struct LikelihoodConfig {
  std::size_t window = 8'000;   // W: errors in the rolling normal model
  std::size_t shortWindow = 10; // W': errors averaged for the recent mean
  double threshold = kDefaultThreshold;

  /// 1 <= W' < W, threshold in [0, 1]. Throws InvalidConfig.
  void validate() const;
};

/// Upper tail of the standard normal, erfc(z / sqrt 2) / 2.
double gaussian_tail(double z) noexcept;

/// Rolling buffer of raw reconstruction errors.
class ErrorDistributionState {
 public:
  ErrorDistributionState() : ErrorDistributionState(LikelihoodConfig{}) {}
  explicit ErrorDistributionState(const LikelihoodConfig& config);

  std::size_t capacity() const { return capacity_; }
  std::size_t short_window() const { return shortWindow_; }
  std::uint64_t observations() const { return observations_; }
  const std::deque<double>& buffer() const { return buffer_; }
  bool warming_up() const { return observations_ < shortWindow_; }

  /// Inserts `error` (evicting the oldest when full), then scores the buffer.
  /// Throws NonFiniteError for NaN, infinity or a negative error.
  double update_and_score(double error);

  /// The likelihood update_and_score would return, without changing state.
  double score_candidate(double error) const;

  nlohmann::json to_json() const;
  static ErrorDistributionState from_json(const nlohmann::json& j);

  bool operator==(const ErrorDistributionState&) const = default;

 private:
  double score() const;

  std::size_t capacity_;
  std::size_t shortWindow_;
  std::uint64_t observations_ = 0;
  std::deque<double> buffer_;
};

/// likelihood >= threshold.
bool flag(double likelihood, double threshold) noexcept;

/// One scored window. Revisions of the same window share `windowStart`.
struct AnomalyAssessment {
  std::int64_t windowStart = 0;
  std::int64_t windowEnd = 0;
  std::int64_t revision = 0;
  std::int64_t registryVersion = 0;
  std::int64_t modelVersion = 0;
  double mse = 0.0;
  std::vector<double> perFeature;
  double likelihood = 0.5;
  bool flagged = false;
  features::PredictionPolicy policy = features::PredictionPolicy::Predict;
  std::vector<features::FeatureKey> topAnomalousFeatures;

  std::string key() const;  // "<windowStart>-r<revision>"
  bool operator==(const AnomalyAssessment&) const = default;
};

nlohmann::json to_json(const AnomalyAssessment& a);
AnomalyAssessment assessment_from_json(const nlohmann::json& j);

}  // namespace gruwatch::likelihood
