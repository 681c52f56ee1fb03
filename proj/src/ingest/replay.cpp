// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/ingest/replay.hpp"

#include <fstream>
#include <string>
#include <thread>

#include "gruwatch/error.hpp"

namespace gruwatch::ingest {

ReplayStats replay_file(const std::filesystem::path& path, const ReplayOptions& options,
                        const std::function<void(const LogRecord&)>& sink) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::FileUnreadable, path.string());

  auto sleep = options.sleeper ? options.sleeper : [](std::chrono::microseconds d) {
    std::this_thread::sleep_for(d);
  };

  ReplayStats stats;
  std::optional<std::int64_t> previous_ts;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    LogRecord record;
    try {
      record = parse_log_record(line).record;
    } catch (const Error&) {
      ++stats.skipped;
      continue;
    }
    if (options.speed && *options.speed > 0.0 && previous_ts && record.timestamp > *previous_ts) {
      const double delay_us = static_cast<double>(record.timestamp - *previous_ts) * 1000.0 / *options.speed;
      sleep(std::chrono::microseconds(static_cast<std::int64_t>(delay_us)));
    }
    if (!previous_ts || record.timestamp > *previous_ts) previous_ts = record.timestamp;
    sink(record);
    ++stats.emitted;
  }
  if (in.bad()) throw Error(ErrorCode::FileUnreadable, path.string());
  return stats;
}

}  // namespace gruwatch::ingest
