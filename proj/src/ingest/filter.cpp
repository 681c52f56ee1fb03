// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/ingest/filter.hpp"

#include <array>
#include <string_view>

#include "gruwatch/error.hpp"

namespace gruwatch::ingest {

namespace {

constexpr std::array<std::string_view, 10> kFields = {
    "eventType",      "appName",   "url",          "groupedUrl", "urlCategory",
    "targetEndpoint", "timestamp", "responseTime", "statusCode", "method",
};

void check_field(const std::string& field) {
  for (auto f : kFields) {
    if (f == field) return;
  }
  throw Error(ErrorCode::InvalidConfig, "unknown filter field '" + field + "'");
}

}  // namespace

std::string field_text(const LogRecord& r, const std::string& field) {
  if (field == "eventType") return r.eventType;
  if (field == "appName") return r.appName;
  if (field == "url") return r.url;
  if (field == "groupedUrl") return r.groupedUrl;
  if (field == "urlCategory") return r.urlCategory;
  if (field == "targetEndpoint") return r.targetEndpoint;
  if (field == "timestamp") return std::to_string(r.timestamp);
  if (field == "responseTime") return nlohmann::json(r.responseTime).dump();
  if (field == "statusCode") return std::to_string(r.statusCode);
  if (field == "method") return r.method;
  return {};
}

FilterPredicate::FilterPredicate(std::string field, FilterOp op, std::string value)
    : field_(std::move(field)), op_(op), value_(std::move(value)) {
  check_field(field_);
  if (op_ == FilterOp::InSet) values_ = {value_};
  if (op_ == FilterOp::Regex) {
    try {
      regex_ = std::make_shared<const std::regex>(value_, std::regex::ECMAScript);
    } catch (const std::regex_error& e) {
      throw Error(ErrorCode::InvalidConfig, "bad regex '" + value_ + "': " + e.what());
    }
  }
}

FilterPredicate::FilterPredicate(std::string field, std::set<std::string> values)
    : field_(std::move(field)), op_(FilterOp::InSet), values_(std::move(values)) {
  check_field(field_);
}

bool FilterPredicate::matches(const LogRecord& record) const {
  const std::string text = field_text(record, field_);
  switch (op_) {
    case FilterOp::Equals: return text == value_;
    case FilterOp::Prefix: return text.compare(0, value_.size(), value_) == 0;
    case FilterOp::Regex: return std::regex_search(text, *regex_);
    case FilterOp::InSet: return values_.count(text) > 0;
  }
  return false;
}

FilterRuleSet FilterRuleSet::from_json(const nlohmann::json& j) {
  FilterRuleSet rules;
  if (j.is_null()) return rules;
  if (!j.is_object()) throw Error(ErrorCode::InvalidConfig, "filters must be an object");

  const std::string mode = j.value("mode", std::string("deny"));
  if (mode == "allow") {
    rules.mode = FilterMode::AllowList;
  } else if (mode == "deny") {
    rules.mode = FilterMode::DenyList;
  } else {
    throw Error(ErrorCode::InvalidConfig, "filter mode must be 'allow' or 'deny'");
  }

  for (const auto& rule : j.value("rules", nlohmann::json::array())) try {
    const std::string field = rule.at("field").get<std::string>();
    const std::string op = rule.at("op").get<std::string>();
    auto as_text = [](const nlohmann::json& v) {
      return v.is_string() ? v.get<std::string>() : v.dump();
    };
    if (op == "in") {
      std::set<std::string> values;
      for (const auto& v : rule.at("values")) values.insert(as_text(v));
      rules.predicates.emplace_back(field, std::move(values));
    } else if (op == "equals") {
      rules.predicates.emplace_back(field, FilterOp::Equals, as_text(rule.at("value")));
    } else if (op == "prefix") {
      rules.predicates.emplace_back(field, FilterOp::Prefix, as_text(rule.at("value")));
    } else if (op == "regex") {
      rules.predicates.emplace_back(field, FilterOp::Regex, as_text(rule.at("value")));
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown filter op '" + op + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("bad filter rule: ") + e.what());
  }
  return rules;
}

bool apply_filters(const LogRecord& record, const FilterRuleSet& rules) {
  bool any = false;
  for (const auto& p : rules.predicates) {
    if (p.matches(record)) {
      any = true;
      break;
    }
  }
  return rules.mode == FilterMode::AllowList ? any : !any;
}

}  // namespace gruwatch::ingest
