// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/orchestrator/unseen.hpp"

#include <algorithm>

namespace gruwatch::orchestrator {

std::string_view to_string(WarningPriority p) noexcept { return p == WarningPriority::High ? "HIGH" : "NORMAL"; }

WarningPriority priority_for(int status_code) noexcept {
  return status_code >= 500 ? WarningPriority::High : WarningPriority::Normal;
}

nlohmann::json UnseenWarning::to_json() const {
  nlohmann::json stats = nlohmann::json::array();
  for (auto s : statistics) stats.push_back(features::to_string(s));
  return {{"appName", group.appName}, {"method", group.method},   {"statusCode", group.statusCode},
          {"source", group.source},   {"statistics", stats},      {"priority", to_string(priority)},
          {"firstSeen", firstSeen},   {"count", count}};
}

void UnseenAccumulator::observe(const std::vector<features::FeatureKey>& keys, std::int64_t time) {
  std::map<features::GroupKey, bool> touched;
  for (const auto& key : keys) {
    auto [it, inserted] = entries_.try_emplace(key.group);
    if (inserted) {
      it->second.firstSeen = time;
      it->second.priority = priority_for(key.group.statusCode);
    }
    auto& stats = statistics_[key.group];
    if (std::find(stats.begin(), stats.end(), key.statistic) == stats.end()) stats.push_back(key.statistic);
    touched[key.group] = true;
  }
  for (const auto& [group, _] : touched) ++entries_[group].count;
}

std::vector<UnseenWarning> UnseenAccumulator::emit_unseen_warnings() {
  std::vector<UnseenWarning> out;
  for (auto& [group, entry] : entries_) {
    if (entry.warned) continue;
    entry.warned = true;
    auto stats = statistics_[group];
    std::sort(stats.begin(), stats.end());
    out.push_back(UnseenWarning{group, stats, entry.priority, entry.firstSeen, entry.count});
  }
  std::stable_sort(out.begin(), out.end(), [](const UnseenWarning& a, const UnseenWarning& b) {
    return a.priority == WarningPriority::High && b.priority != WarningPriority::High;
  });
  return out;
}

void UnseenAccumulator::absorb(const features::FeatureRegistry& registry) {
  for (auto it = entries_.begin(); it != entries_.end();) {
    const bool covered = registry.contains(features::FeatureKey{it->first, features::Statistic::Count});
    if (covered) {
      statistics_.erase(it->first);
      it = entries_.erase(it);
    } else {
      it->second.warned = false;
      ++it;
    }
  }
}

}  // namespace gruwatch::orchestrator
