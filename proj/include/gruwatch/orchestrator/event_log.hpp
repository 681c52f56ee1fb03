// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <deque>
#include <mutex>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

namespace gruwatch::orchestrator {

/// Structured operational events written as one JSON object per line.
/// The most recent events are also kept in memory for inspection.
class EventLog {
 public:
  explicit EventLog(std::ostream* sink = nullptr, std::size_t keep = 100'000);

  /// Adds {"event", "level", "time"} to `detail` and records it.
  void emit(const std::string& event, const std::string& level, std::int64_t time,
            nlohmann::json detail = nlohmann::json::object());

  std::vector<nlohmann::json> events() const;
  std::vector<nlohmann::json> of_type(const std::string& event) const;
  std::size_t count(const std::string& event) const;
  void clear();

 private:
  std::ostream* sink_;
  std::size_t keep_;
  mutable std::mutex mutex_;
  std::deque<nlohmann::json> events_;
};

}  // namespace gruwatch::orchestrator
