// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gruwatch/features/window.hpp"
#include "gruwatch/ingest/log_record.hpp"

namespace gruwatch::orchestrator {

struct RawEntry {
  ingest::LogRecord record;
  std::string source;
};

/// Raw records per window (kept for the retention horizon) and the closed,
/// aggregated windows (kept for the training horizon).
class WindowStore {
 public:
  WindowStore(std::int64_t window_ms, bool per_source_keys);

  std::int64_t window_ms() const { return windowMs_; }

  void add(const ingest::LogRecord& record, const std::string& source);

  /// Aggregates the window's raw records and stores the result as closed.
  const features::AggregationWindow& close(std::int64_t start);
  bool is_closed(std::int64_t start) const { return closed_.count(start) > 0; }

  /// Closed window, or an empty one for any start without records.
  features::AggregationWindow window(std::int64_t start) const;
  bool is_empty(std::int64_t start) const;

  /// Closed windows for starts first, first + w, ..., last (inclusive).
  std::vector<features::AggregationWindow> range(std::int64_t first, std::int64_t last) const;

  std::vector<RawEntry> raw(std::int64_t start) const;
  bool has_raw(std::int64_t start) const { return raw_.count(start) > 0; }
  /// Raw records with from <= timestamp < to.
  std::vector<RawEntry> raw_between(std::int64_t from, std::int64_t to) const;

  /// Earliest window start seen (raw or closed), if any.
  std::optional<std::int64_t> earliest() const;
  std::optional<std::int64_t> latest_raw() const;

  /// Drops raw records older than `raw_before` and closed windows older than
  /// `closed_before`.
  void prune(std::int64_t raw_before, std::int64_t closed_before);

  const std::map<std::int64_t, features::AggregationWindow>& closed() const { return closed_; }
  const std::map<std::int64_t, std::vector<RawEntry>>& raw_windows() const { return raw_; }

  void restore_closed(features::AggregationWindow w);

 private:
  std::int64_t windowMs_;
  bool perSourceKeys_;
  std::map<std::int64_t, std::vector<RawEntry>> raw_;
  std::map<std::int64_t, features::AggregationWindow> closed_;
};

}  // namespace gruwatch::orchestrator
