// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/features/seasonality.hpp"

#include <cmath>
#include <numbers>

namespace gruwatch::features {

std::string_view seasonality_label(std::size_t slot) noexcept {
  static constexpr std::array<std::string_view, kSeasonalityColumns> kLabels = {
      "season|hour|sin", "season|hour|cos", "season|day|sin",   "season|day|cos",
      "season|week|sin", "season|week|cos", "season|month|sin", "season|month|cos",
  };
  return slot < kLabels.size() ? kLabels[slot] : std::string_view("season|?");
}

SeasonalityFeatures seasonal_features(std::int64_t window_start_ms) noexcept {
  std::int64_t t = window_start_ms / 1000;
  if (window_start_ms % 1000 != 0 && window_start_ms < 0) --t;
  SeasonalityFeatures out{};
  for (std::size_t p = 0; p < kSeasonPeriodsSeconds.size(); ++p) {
    const std::int64_t period = kSeasonPeriodsSeconds[p];
    std::int64_t phase = t % period;
    if (phase < 0) phase += period;
    const double angle = 2.0 * std::numbers::pi * static_cast<double>(phase) / static_cast<double>(period);
    out[2 * p] = std::sin(angle);
    out[2 * p + 1] = std::cos(angle);
  }
  return out;
}

}  // namespace gruwatch::features
