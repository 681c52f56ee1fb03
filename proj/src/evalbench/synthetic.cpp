// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/evalbench/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "gruwatch/error.hpp"

namespace gruwatch::evalbench {

using nlohmann::json;

std::string_view to_string(InjectionKind k) noexcept {
  switch (k) {
    case InjectionKind::Spike: return "spike";
    case InjectionKind::Dropout: return "dropout";
    case InjectionKind::LevelShift: return "level-shift";
    case InjectionKind::BurstCount: return "burst-count";
  }
  return "spike";
}

InjectionKind injection_kind_from_string(std::string_view s) {
  for (auto k : {InjectionKind::Spike, InjectionKind::Dropout, InjectionKind::LevelShift, InjectionKind::BurstCount}) {
    if (to_string(k) == s) return k;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown injection kind '" + std::string(s) + "'");
}

json SyntheticSpec::to_json() const {
  return json{{"startMs", startMs},
              {"windows", windows},
              {"windowSeconds", windowSeconds},
              {"apps", apps},
              {"baseResponseMs", baseResponseMs},
              {"dailyAmplitude", dailyAmplitude},
              {"weeklyAmplitude", weeklyAmplitude},
              {"noiseSigma", noiseSigma},
              {"recordsPerWindow", recordsPerWindow},
              {"seed", seed}};
}

SyntheticSpec SyntheticSpec::from_json(const json& j) {
  SyntheticSpec s;
  s.startMs = j.value("startMs", s.startMs);
  s.windows = j.value("windows", s.windows);
  s.windowSeconds = j.value("windowSeconds", s.windowSeconds);
  s.apps = j.value("apps", s.apps);
  s.baseResponseMs = j.value("baseResponseMs", s.baseResponseMs);
  s.dailyAmplitude = j.value("dailyAmplitude", s.dailyAmplitude);
  s.weeklyAmplitude = j.value("weeklyAmplitude", s.weeklyAmplitude);
  s.noiseSigma = j.value("noiseSigma", s.noiseSigma);
  s.recordsPerWindow = j.value("recordsPerWindow", s.recordsPerWindow);
  s.seed = j.value("seed", s.seed);
  return s;
}

SyntheticStream generate_stream(const SyntheticSpec& spec, const std::vector<Injection>& injections) {
  if (spec.windows == 0 || spec.windowSeconds <= 0 || spec.apps.empty()) {
    throw Error(ErrorCode::InvalidConfig, "synthetic stream needs windows, a window length and apps");
  }
  for (const auto& inj : injections) {
    if (inj.duration == 0 || inj.start + inj.duration > spec.windows) {
      throw Error(ErrorCode::OutOfBounds, "injection at " + std::to_string(inj.start) + " for " +
                                              std::to_string(inj.duration) + " windows leaves the stream");
    }
  }

  SyntheticStream out;
  out.startMs = spec.startMs;
  out.windowMs = spec.windowSeconds * 1000;
  out.windows = spec.windows;
  for (const auto& inj : injections) {
    out.truth.push_back({static_cast<std::int64_t>(inj.start), static_cast<std::int64_t>(inj.start + inj.duration - 1)});
  }
  std::sort(out.truth.begin(), out.truth.end(), [](const auto& a, const auto& b) { return a.start < b.start; });

  std::mt19937_64 rng(spec.seed);
  std::normal_distribution<double> noise(0.0, spec.noiseSigma);
  std::uniform_int_distribution<std::int64_t> offset(0, out.windowMs - 1);
  constexpr double kDay = 86'400'000.0;
  constexpr double kWeek = 7 * kDay;

  for (std::size_t w = 0; w < spec.windows; ++w) {
    const std::int64_t start = spec.startMs + static_cast<std::int64_t>(w) * out.windowMs;
    const double t = static_cast<double>(start - spec.startMs);
    const double daily = std::sin(2.0 * std::numbers::pi * t / kDay);
    const double weekly = std::sin(2.0 * std::numbers::pi * t / kWeek);

    double rt_factor = 1.0;
    double count_factor = 1.0;
    bool dropped = false;
    for (const auto& inj : injections) {
      if (w < inj.start || w >= inj.start + inj.duration) continue;
      switch (inj.kind) {
        case InjectionKind::Spike:
        case InjectionKind::LevelShift: rt_factor *= inj.magnitude; break;
        case InjectionKind::BurstCount: count_factor *= inj.magnitude; break;
        case InjectionKind::Dropout: dropped = true; break;
      }
    }

    const std::size_t first = out.records.size();
    for (std::size_t a = 0; a < spec.apps.size(); ++a) {
      const double rate = spec.recordsPerWindow * (1.0 + 0.4 * daily) * count_factor;
      std::poisson_distribution<int> count(rate);
      const int n = count(rng);
      for (int i = 0; i < n; ++i) {
        ingest::LogRecord r;
        r.eventType = "request";
        r.appName = spec.apps[a];
        r.method = "GET";
        r.statusCode = 200;
        r.url = "/" + spec.apps[a];
        r.groupedUrl = r.url;
        r.timestamp = start + offset(rng);
        const double level = spec.baseResponseMs * (1.0 + 0.25 * static_cast<double>(a)) *
                             (1.0 + spec.dailyAmplitude * daily + spec.weeklyAmplitude * weekly);
        r.responseTime = level * std::exp(noise(rng)) * rt_factor;
        if (!dropped) out.records.push_back(std::move(r));
      }
    }
    std::sort(out.records.begin() + static_cast<std::ptrdiff_t>(first), out.records.end(),
              [](const auto& x, const auto& y) { return x.timestamp < y.timestamp; });
  }
  return out;
}

}  // namespace gruwatch::evalbench
