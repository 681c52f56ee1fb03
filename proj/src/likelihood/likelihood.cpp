// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/likelihood/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gruwatch/error.hpp"

namespace gruwatch::likelihood {

using nlohmann::json;

void LikelihoodConfig::validate() const {
  if (shortWindow < 1 || shortWindow >= window) {
    throw Error(ErrorCode::InvalidConfig, "likelihood windows need 1 <= short_window < window_w");
  }
  if (!(threshold >= 0.0 && threshold <= 1.0)) {
    throw Error(ErrorCode::InvalidConfig, "likelihood.threshold must lie in [0, 1]");
  }
}

double gaussian_tail(double z) noexcept { return 0.5 * std::erfc(z / std::numbers::sqrt2); }

ErrorDistributionState::ErrorDistributionState(const LikelihoodConfig& config)
    : capacity_(config.window), shortWindow_(config.shortWindow) {
  config.validate();
}

double ErrorDistributionState::update_and_score(double error) {
  if (!std::isfinite(error) || error < 0.0) {
    throw Error(ErrorCode::NonFiniteError, "reconstruction error must be finite and non-negative");
  }
  buffer_.push_back(error);
  if (buffer_.size() > capacity_) buffer_.pop_front();
  ++observations_;
  return score();
}

double ErrorDistributionState::score_candidate(double error) const {
  ErrorDistributionState copy = *this;
  return copy.update_and_score(error);
}

// Sums run over deviations from the newest value so a constant buffer yields
// exact zeros and the likelihood is exactly one half.
double ErrorDistributionState::score() const {
  if (warming_up()) return 0.5;
  const double ref = buffer_.back();
  const auto n = static_cast<double>(buffer_.size());

  double dev = 0.0;
  for (double x : buffer_) dev += x - ref;
  const double mean_dev = dev / n;

  double var = 0.0;
  for (double x : buffer_) {
    const double d = (x - ref) - mean_dev;
    var += d * d;
  }
  const double sigma = std::max(std::sqrt(var / n), kSigmaFloor);

  const std::size_t w = std::min(shortWindow_, buffer_.size());
  double recent = 0.0;
  for (auto it = buffer_.end() - static_cast<std::ptrdiff_t>(w); it != buffer_.end(); ++it) recent += *it - ref;
  const double recent_dev = recent / static_cast<double>(w);

  const double z = (recent_dev - mean_dev) / sigma;
  return std::clamp(1.0 - gaussian_tail(z), 0.0, 1.0);
}

json ErrorDistributionState::to_json() const {
  return json{{"capacity", capacity_},
              {"shortWindow", shortWindow_},
              {"observations", observations_},
              {"buffer", std::vector<double>(buffer_.begin(), buffer_.end())}};
}

ErrorDistributionState ErrorDistributionState::from_json(const json& j) {
  try {
    LikelihoodConfig cfg;
    cfg.window = j.at("capacity").get<std::size_t>();
    cfg.shortWindow = j.at("shortWindow").get<std::size_t>();
    ErrorDistributionState s(cfg);
    s.observations_ = j.at("observations").get<std::uint64_t>();
    const auto values = j.at("buffer").get<std::vector<double>>();
    if (values.size() > cfg.window || values.size() > s.observations_) {
      throw Error(ErrorCode::InvalidConfig, "likelihood buffer longer than its capacity");
    }
    s.buffer_.assign(values.begin(), values.end());
    return s;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
}

bool flag(double likelihood, double threshold) noexcept { return likelihood >= threshold; }

std::string AnomalyAssessment::key() const {
  return std::to_string(windowStart) + "-r" + std::to_string(revision);
}

json to_json(const AnomalyAssessment& a) {
  json keys = json::array();
  for (const auto& k : a.topAnomalousFeatures) keys.push_back(features::to_json(k));
  return json{{"windowStart", a.windowStart},
              {"windowEnd", a.windowEnd},
              {"revision", a.revision},
              {"registryVersion", a.registryVersion},
              {"modelVersion", a.modelVersion},
              {"mse", a.mse},
              {"perFeature", a.perFeature},
              {"likelihood", a.likelihood},
              {"flagged", a.flagged},
              {"policy", features::to_string(a.policy)},
              {"topAnomalousFeatures", keys}};
}

AnomalyAssessment assessment_from_json(const json& j) {
  try {
    AnomalyAssessment a;
    a.windowStart = j.at("windowStart").get<std::int64_t>();
    a.windowEnd = j.at("windowEnd").get<std::int64_t>();
    a.revision = j.at("revision").get<std::int64_t>();
    a.registryVersion = j.at("registryVersion").get<std::int64_t>();
    a.modelVersion = j.at("modelVersion").get<std::int64_t>();
    a.mse = j.at("mse").get<double>();
    a.perFeature = j.at("perFeature").get<std::vector<double>>();
    a.likelihood = j.at("likelihood").get<double>();
    a.flagged = j.at("flagged").get<bool>();
    a.policy = features::policy_from_string(j.at("policy").get<std::string>());
    for (const auto& k : j.at("topAnomalousFeatures")) a.topAnomalousFeatures.push_back(features::feature_key_from_json(k));
    return a;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
}

}  // namespace gruwatch::likelihood
