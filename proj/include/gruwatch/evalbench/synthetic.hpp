// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gruwatch/evalbench/confusion.hpp"
#include "gruwatch/ingest/log_record.hpp"

namespace gruwatch::evalbench {

enum class InjectionKind { Spike, Dropout, LevelShift, BurstCount };

std::string_view to_string(InjectionKind k) noexcept;
InjectionKind injection_kind_from_string(std::string_view s);

/// An anomaly covering windows [start, start + duration).
struct Injection {
  std::size_t start = 0;
  std::size_t duration = 1;
  InjectionKind kind = InjectionKind::Spike;
  double magnitude = 10.0;  // response-time factor (spike, level shift) or count factor (burst)
};

/// Seasonal request traffic: per window and app, a Poisson number of GET/200
/// records whose response times follow a daily and weekly sine profile with
/// log-normal noise.
struct SyntheticSpec {
  std::int64_t startMs = 1'601'510'400'000;  // 2020-10-01T00:00:00Z
  std::size_t windows = 2'000;
  std::int64_t windowSeconds = 300;
  std::vector<std::string> apps = {"catalog", "billing"};
  double baseResponseMs = 120.0;
  double dailyAmplitude = 0.3;
  double weeklyAmplitude = 0.15;
  double noiseSigma = 0.1;
  double recordsPerWindow = 30.0;
  std::uint64_t seed = 7;

  nlohmann::json to_json() const;
  static SyntheticSpec from_json(const nlohmann::json& j);
};

struct SyntheticStream {
  std::int64_t startMs = 0;
  std::int64_t windowMs = 0;
  std::size_t windows = 0;
  std::vector<ingest::LogRecord> records;  // ordered by timestamp
  std::vector<LabeledRange> truth;         // window indices
};

/// Deterministic for a given spec and injection list. Throws OutOfBounds when
/// an injection leaves the stream or has zero duration.
SyntheticStream generate_stream(const SyntheticSpec& spec, const std::vector<Injection>& injections);

}  // namespace gruwatch::evalbench
