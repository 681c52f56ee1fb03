// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <map>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "gruwatch/features/registry.hpp"

namespace gruwatch::orchestrator {

enum class WarningPriority { Normal, High };

std::string_view to_string(WarningPriority p) noexcept;

/// Server errors (5xx) are high priority, everything else normal.
WarningPriority priority_for(int status_code) noexcept;

struct UnseenEntry {
  std::int64_t firstSeen = 0;
  std::uint64_t count = 0;
  WarningPriority priority = WarningPriority::Normal;
  bool warned = false;
};

struct UnseenWarning {
  features::GroupKey group;
  std::vector<features::Statistic> statistics;
  WarningPriority priority = WarningPriority::Normal;
  std::int64_t firstSeen = 0;
  std::uint64_t count = 0;

  nlohmann::json to_json() const;
};

/// Feature keys observed in traffic but missing from the active registry,
/// tracked per response-time group until a retrain absorbs them.
class UnseenAccumulator {
 public:
  void observe(const std::vector<features::FeatureKey>& keys, std::int64_t time);

  /// Groups not yet warned about in this retrain cycle, high priority first.
  std::vector<UnseenWarning> emit_unseen_warnings();

  /// Drops groups the new registry covers and starts a new warning cycle for
  /// the rest.
  void absorb(const features::FeatureRegistry& registry);

  bool contains(const features::GroupKey& group) const { return entries_.count(group) > 0; }
  std::size_t size() const { return entries_.size(); }
  const std::map<features::GroupKey, UnseenEntry>& entries() const { return entries_; }

 private:
  std::map<features::GroupKey, UnseenEntry> entries_;
  std::map<features::GroupKey, std::vector<features::Statistic>> statistics_;
};

}  // namespace gruwatch::orchestrator
