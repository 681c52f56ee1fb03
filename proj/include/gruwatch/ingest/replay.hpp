// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>

#include "gruwatch/ingest/log_record.hpp"

namespace gruwatch::ingest {

struct ReplayStats {
  std::size_t emitted = 0;
  std::size_t skipped = 0;
};

struct ReplayOptions {
  /// Wall-clock speed-up relative to record timestamps; nullopt replays as
  /// fast as possible.
  std::optional<double> speed;
  /// Injectable for tests; defaults to std::this_thread::sleep_for.
  std::function<void(std::chrono::microseconds)> sleeper;
};

/// Streams a newline-delimited JSON file in file order. Bad lines are counted
/// and skipped; an unreadable file throws FileUnreadable.
ReplayStats replay_file(const std::filesystem::path& path, const ReplayOptions& options,
                        const std::function<void(const LogRecord&)>& sink);

}  // namespace gruwatch::ingest
