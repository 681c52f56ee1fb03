// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/orchestrator/event_log.hpp"

namespace gruwatch::orchestrator {

using nlohmann::json;

EventLog::EventLog(std::ostream* sink, std::size_t keep) : sink_(sink), keep_(keep) {}

void EventLog::emit(const std::string& event, const std::string& level, std::int64_t time, json detail) {
  if (!detail.is_object()) detail = json{{"detail", std::move(detail)}};
  detail["event"] = event;
  detail["level"] = level;
  detail["time"] = time;
  std::lock_guard lock(mutex_);
  if (sink_ != nullptr) *sink_ << detail.dump() << '\n';
  events_.push_back(std::move(detail));
  while (events_.size() > keep_) events_.pop_front();
}

std::vector<json> EventLog::events() const {
  std::lock_guard lock(mutex_);
  return {events_.begin(), events_.end()};
}

std::vector<json> EventLog::of_type(const std::string& event) const {
  std::lock_guard lock(mutex_);
  std::vector<json> out;
  for (const auto& e : events_) {
    if (e["event"] == event) out.push_back(e);
  }
  return out;
}

std::size_t EventLog::count(const std::string& event) const {
  std::lock_guard lock(mutex_);
  std::size_t n = 0;
  for (const auto& e : events_) n += e["event"] == event ? 1 : 0;
  return n;
}

void EventLog::clear() {
  std::lock_guard lock(mutex_);
  events_.clear();
}

}  // namespace gruwatch::orchestrator
