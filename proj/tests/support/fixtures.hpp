// SPDX-License-Identifier: Apache-2.0
// Small detector configurations and record builders shared by the tests.
#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gruwatch/config.hpp"
#include "gruwatch/evalbench/synthetic.hpp"
#include "gruwatch/ingest/log_record.hpp"

namespace testsupport {

inline constexpr std::int64_t kStartMs = 1'601'510'400'000;  // 2020-10-01T00:00:00Z

/// One-minute windows and a tiny model so a full lifecycle runs in well
/// under a second.
inline gruwatch::Config small_config() {
  gruwatch::Config c;
  c.windowSeconds = 60;
  c.tickIntervalSeconds = 60;
  c.training.lookback = 4;
  c.training.encoderHidden = 8;
  c.training.decoderHidden = 8;
  c.training.epochs = 3;
  c.training.batchSize = 8;
  c.training.learningRate = 0.1;
  c.retrainIntervalHours = 0;
  c.retrainMinWindows = 40;
  c.retrainHorizonWindows = 200;
  c.retrainAsync = false;
  c.retentionHours = 2;
  c.likelihood.window = 200;
  c.likelihood.shortWindow = 1;
  return c;
}

inline gruwatch::ingest::LogRecord record(const std::string& app, std::int64_t ts, double rt, int status = 200,
                                          const std::string& method = "GET") {
  gruwatch::ingest::LogRecord r;
  r.eventType = "performanceMetics";
  r.appName = app;
  r.timestamp = ts;
  r.responseTime = rt;
  r.statusCode = status;
  r.method = method;
  return r;
}

inline gruwatch::evalbench::SyntheticStream baseline_stream(std::size_t windows, std::int64_t window_seconds = 60,
                                                             std::uint64_t seed = 7) {
  gruwatch::evalbench::SyntheticSpec spec;
  spec.startMs = kStartMs;
  spec.windows = windows;
  spec.windowSeconds = window_seconds;
  spec.recordsPerWindow = 20;
  spec.seed = seed;
  return gruwatch::evalbench::generate_stream(spec, {});
}

}  // namespace testsupport
