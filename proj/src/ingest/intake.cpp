// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/ingest/intake.hpp"

#include <iostream>

#include "gruwatch/error.hpp"

namespace gruwatch::ingest {

void IntakeChannel::push(IntakeItem item) {
  {
    std::lock_guard lock(mutex_);
    queue_.push_back(std::move(item));
  }
  ready_.notify_one();
}

void IntakeChannel::push_many(std::vector<IntakeItem> items) {
  if (items.empty()) return;
  {
    std::lock_guard lock(mutex_);
    for (auto& item : items) queue_.push_back(std::move(item));
  }
  ready_.notify_one();
}

std::vector<IntakeItem> IntakeChannel::drain() {
  std::lock_guard lock(mutex_);
  std::vector<IntakeItem> out(std::make_move_iterator(queue_.begin()),
                              std::make_move_iterator(queue_.end()));
  queue_.clear();
  return out;
}

std::vector<IntakeItem> IntakeChannel::wait_and_drain(std::chrono::milliseconds timeout) {
  std::unique_lock lock(mutex_);
  ready_.wait_for(lock, timeout, [this] { return !queue_.empty(); });
  std::vector<IntakeItem> out(std::make_move_iterator(queue_.begin()),
                              std::make_move_iterator(queue_.end()));
  queue_.clear();
  return out;
}

std::size_t IntakeChannel::size() const {
  std::lock_guard lock(mutex_);
  return queue_.size();
}

Ingestor::Ingestor(IntakeChannel& channel, FilterRuleSet rules, std::size_t max_body_bytes)
    : channel_(channel), rules_(std::move(rules)), max_body_bytes_(max_body_bytes) {}

bool Ingestor::offer(const LogRecord& record, const std::string& source_id) {
  if (!apply_filters(record, rules_)) {
    ++stats_.filtered;
    return false;
  }
  channel_.push(IntakeItem{record, source_id});
  return true;
}

Acknowledgment Ingestor::ingest_push(std::string_view body, const std::string& source_id) {
  if (body.size() > max_body_bytes_) {
    throw Error(ErrorCode::PayloadTooLarge, std::to_string(body.size()) + " bytes exceeds cap of " +
                                                std::to_string(max_body_bytes_));
  }

  Acknowledgment ack;
  auto parsed = nlohmann::json::parse(body.begin(), body.end(), nullptr, false);
  if (parsed.is_discarded()) {
    ack.rejected = 1;
    stats_.rejected += 1;
    return ack;
  }

  std::vector<IntakeItem> kept;
  auto consume = [&](const nlohmann::json& element) {
    try {
      ParsedRecord p = parse_log_record_json(element);
      stats_.unknownFields += p.unknownFields;
      if (!apply_filters(p.record, rules_)) {
        ++stats_.filtered;
        ++ack.rejected;
        return;
      }
      kept.push_back(IntakeItem{std::move(p.record), source_id});
      ++ack.accepted;
    } catch (const Error& e) {
      ++ack.rejected;
      std::clog << R"({"event":"ingest_reject","source":")" << source_id << R"(","reason":")"
                << to_string(e.code()) << "\"}\n";
    }
  };

  if (parsed.is_array()) {
    for (const auto& element : parsed) consume(element);
  } else {
    consume(parsed);
  }
  channel_.push_many(std::move(kept));
  stats_.accepted += ack.accepted;
  stats_.rejected += ack.rejected;
  return ack;
}

}  // namespace gruwatch::ingest
