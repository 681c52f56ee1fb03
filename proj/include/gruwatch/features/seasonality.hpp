// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <cstdint>
#include <string_view>

namespace gruwatch::features {

inline constexpr std::array<std::int64_t, 4> kSeasonPeriodsSeconds = {
    3'600,      // hour
    86'400,     // day
    604'800,    // week
    2'592'000,  // 30-day month
};

inline constexpr std::size_t kSeasonalityColumns = 8;

/// (sin, cos) per period, in kSeasonPeriodsSeconds order.
using SeasonalityFeatures = std::array<double, kSeasonalityColumns>;

std::string_view seasonality_label(std::size_t slot) noexcept;

/// Phase of the window start within each period, as sin/cos of 2*pi*(t mod P)/P
/// with t in whole seconds since epoch.
SeasonalityFeatures seasonal_features(std::int64_t window_start_ms) noexcept;

}  // namespace gruwatch::features
