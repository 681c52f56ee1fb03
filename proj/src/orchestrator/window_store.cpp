// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/orchestrator/window_store.hpp"

#include <algorithm>

namespace gruwatch::orchestrator {

WindowStore::WindowStore(std::int64_t window_ms, bool per_source_keys)
    : windowMs_(window_ms), perSourceKeys_(per_source_keys) {}

void WindowStore::add(const ingest::LogRecord& record, const std::string& source) {
  raw_[features::window_of(record.timestamp, windowMs_)].push_back(RawEntry{record, source});
}

const features::AggregationWindow& WindowStore::close(std::int64_t start) {
  std::vector<ingest::LogRecord> records;
  std::vector<std::string> sources;
  if (auto it = raw_.find(start); it != raw_.end()) {
    for (const auto& e : it->second) {
      records.push_back(e.record);
      sources.push_back(e.source);
    }
  }
  auto agg = features::aggregate_window(records, start, start + windowMs_,
                                        perSourceKeys_ ? std::span<const std::string>(sources)
                                                       : std::span<const std::string>());
  return closed_[start] = std::move(agg);
}

features::AggregationWindow WindowStore::window(std::int64_t start) const {
  if (auto it = closed_.find(start); it != closed_.end()) return it->second;
  return features::AggregationWindow{start, start + windowMs_, {}};
}

bool WindowStore::is_empty(std::int64_t start) const {
  auto it = closed_.find(start);
  return it == closed_.end() || it->second.empty();
}

std::vector<features::AggregationWindow> WindowStore::range(std::int64_t first, std::int64_t last) const {
  std::vector<features::AggregationWindow> out;
  for (std::int64_t s = first; s <= last; s += windowMs_) out.push_back(window(s));
  return out;
}

std::vector<RawEntry> WindowStore::raw(std::int64_t start) const {
  auto it = raw_.find(start);
  return it == raw_.end() ? std::vector<RawEntry>{} : it->second;
}

std::vector<RawEntry> WindowStore::raw_between(std::int64_t from, std::int64_t to) const {
  std::vector<RawEntry> out;
  for (auto it = raw_.lower_bound(features::window_of(from, windowMs_)); it != raw_.end() && it->first < to; ++it) {
    for (const auto& e : it->second) {
      if (e.record.timestamp >= from && e.record.timestamp < to) out.push_back(e);
    }
  }
  return out;
}

std::optional<std::int64_t> WindowStore::earliest() const {
  std::optional<std::int64_t> out;
  if (!raw_.empty()) out = raw_.begin()->first;
  if (!closed_.empty()) out = out ? std::min(*out, closed_.begin()->first) : closed_.begin()->first;
  return out;
}

std::optional<std::int64_t> WindowStore::latest_raw() const {
  if (raw_.empty()) return std::nullopt;
  return raw_.rbegin()->first;
}

void WindowStore::prune(std::int64_t raw_before, std::int64_t closed_before) {
  raw_.erase(raw_.begin(), raw_.lower_bound(raw_before));
  closed_.erase(closed_.begin(), closed_.lower_bound(closed_before));
}

void WindowStore::restore_closed(features::AggregationWindow w) {
  const std::int64_t start = w.start;
  closed_[start] = std::move(w);
}

}  // namespace gruwatch::orchestrator
