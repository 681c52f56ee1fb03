// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <memory>
#include <regex>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "gruwatch/ingest/log_record.hpp"

namespace gruwatch::ingest {

enum class FilterOp { Equals, Prefix, Regex, InSet };
enum class FilterMode { AllowList, DenyList };

/// One predicate over a LogRecord field. Numeric fields are compared through
/// their canonical decimal text ("200", "1601824467164").
class FilterPredicate {
 public:
  FilterPredicate(std::string field, FilterOp op, std::string value);
  FilterPredicate(std::string field, std::set<std::string> values);

  bool matches(const LogRecord& record) const;

  const std::string& field() const { return field_; }
  FilterOp op() const { return op_; }

 private:
  std::string field_;
  FilterOp op_;
  std::string value_;
  std::set<std::string> values_;
  std::shared_ptr<const std::regex> regex_;
};

/// Predicates are OR-ed: an allow-list keeps a record matching any predicate,
/// a deny-list drops it.
struct FilterRuleSet {
  FilterMode mode = FilterMode::DenyList;
  std::vector<FilterPredicate> predicates;

  /// {"mode": "allow"|"deny", "rules": [{"field", "op", "value" | "values"}]}.
  /// Throws Error{InvalidConfig} for unknown fields, operators or bad regexes.
  static FilterRuleSet from_json(const nlohmann::json& j);
};

/// Text of a record field as seen by predicates; empty for unknown names.
std::string field_text(const LogRecord& record, const std::string& field);

bool apply_filters(const LogRecord& record, const FilterRuleSet& rules);

}  // namespace gruwatch::ingest
