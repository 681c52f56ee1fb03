// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <deque>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gruwatch/ingest/filter.hpp"
#include "gruwatch/ingest/log_record.hpp"

namespace gruwatch::ingest {

struct IntakeItem {
  LogRecord record;
  std::string sourceId;
};

/// The single ordered hand-off between concurrent producers (HTTP pushes,
/// replays) and the aggregation consumer.
class IntakeChannel {
 public:
  void push(IntakeItem item);
  void push_many(std::vector<IntakeItem> items);

  /// Everything queued so far, in arrival order.
  std::vector<IntakeItem> drain();

  /// Blocks up to `timeout` for at least one item.
  std::vector<IntakeItem> wait_and_drain(std::chrono::milliseconds timeout);

  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  std::condition_variable ready_;
  std::deque<IntakeItem> queue_;
};

struct Acknowledgment {
  std::size_t accepted = 0;
  std::size_t rejected = 0;
};

struct IngestStats {
  std::atomic<std::size_t> accepted{0};
  std::atomic<std::size_t> rejected{0};
  std::atomic<std::size_t> filtered{0};
  std::atomic<std::size_t> unknownFields{0};
};

/// Parses, validates, filters and enqueues pushed telemetry.
class Ingestor {
 public:
  Ingestor(IntakeChannel& channel, FilterRuleSet rules, std::size_t max_body_bytes);

  /// `body` holds one record object or an array of them. Per-record failures
  /// are counted, never thrown; only an oversized body throws PayloadTooLarge.
  Acknowledgment ingest_push(std::string_view body, const std::string& source_id);

  /// Filters one already-parsed record and enqueues it when kept.
  bool offer(const LogRecord& record, const std::string& source_id);

  const IngestStats& stats() const { return stats_; }
  std::size_t max_body_bytes() const { return max_body_bytes_; }

 private:
  IntakeChannel& channel_;
  FilterRuleSet rules_;
  std::size_t max_body_bytes_;
  IngestStats stats_;
};

}  // namespace gruwatch::ingest
