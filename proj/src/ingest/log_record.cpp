// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/ingest/log_record.hpp"

#include <array>
#include <cmath>

#include "gruwatch/error.hpp"

namespace gruwatch::ingest {

using nlohmann::json;

namespace {

constexpr std::array<std::string_view, 10> kKnownFields = {
    "eventType",      "appName",   "url",          "groupedUrl", "urlCategory",
    "targetEndpoint", "timestamp", "responseTime", "statusCode", "method",
};

constexpr std::array<std::string_view, 7> kKnownMethods = {
    "GET", "POST", "PUT", "DELETE", "PATCH", "HEAD", "OPTIONS",
};

const json& require(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) throw Error(ErrorCode::MissingField, field);
  return *it;
}

std::string optional_string(const json& obj, const char* field) {
  auto it = obj.find(field);
  if (it == obj.end() || it->is_null()) return {};
  if (!it->is_string()) throw Error(ErrorCode::MalformedJson, std::string(field) + " is not a string");
  return it->get<std::string>();
}

bool is_uppercase_token(std::string_view s) {
  if (s.empty()) return false;
  for (char c : s) {
    const bool ok = (c >= 'A' && c <= 'Z') || c == '-' || c == '_';
    if (!ok) return false;
  }
  return true;
}

}  // namespace

bool is_known_method(std::string_view method) noexcept {
  for (auto m : kKnownMethods) {
    if (m == method) return true;
  }
  return false;
}

ParsedRecord parse_log_record_json(const json& obj) {
  if (!obj.is_object()) throw Error(ErrorCode::MalformedJson, "record is not a JSON object");

  ParsedRecord out;
  LogRecord& r = out.record;

  const json& app = require(obj, "appName");
  if (!app.is_string()) throw Error(ErrorCode::MalformedJson, "appName is not a string");
  r.appName = app.get<std::string>();

  const json& ts = require(obj, "timestamp");
  if (!ts.is_number_integer()) throw Error(ErrorCode::MalformedJson, "timestamp is not an integer");
  r.timestamp = ts.get<std::int64_t>();

  const json& rt = require(obj, "responseTime");
  if (!rt.is_number()) throw Error(ErrorCode::MalformedJson, "responseTime is not a number");
  r.responseTime = rt.get<double>();

  const json& sc = require(obj, "statusCode");
  if (!sc.is_number_integer()) throw Error(ErrorCode::MalformedJson, "statusCode is not an integer");
  const auto status = sc.get<std::int64_t>();

  const json& method = require(obj, "method");
  if (!method.is_string()) throw Error(ErrorCode::MalformedJson, "method is not a string");
  r.method = method.get<std::string>();

  r.eventType = optional_string(obj, "eventType");
  r.url = optional_string(obj, "url");
  r.groupedUrl = optional_string(obj, "groupedUrl");
  r.urlCategory = optional_string(obj, "urlCategory");
  r.targetEndpoint = optional_string(obj, "targetEndpoint");
  if (r.targetEndpoint.empty()) r.targetEndpoint = optional_string(obj, "target-endpoint");

  if (r.appName.empty()) throw Error(ErrorCode::RangeViolation, "appName is empty");
  if (r.timestamp <= 0) throw Error(ErrorCode::RangeViolation, "timestamp must be positive");
  if (!std::isfinite(r.responseTime) || r.responseTime < 0.0) {
    throw Error(ErrorCode::RangeViolation, "responseTime must be finite and non-negative");
  }
  if (status < 100 || status > 599) throw Error(ErrorCode::RangeViolation, "statusCode outside [100, 599]");
  r.statusCode = static_cast<int>(status);
  if (!is_uppercase_token(r.method)) {
    throw Error(ErrorCode::RangeViolation, "method must be a non-empty uppercase token");
  }

  for (const auto& item : obj.items()) {
    bool known = item.key() == "target-endpoint";
    for (auto f : kKnownFields) known = known || f == item.key();
    if (!known) ++out.unknownFields;
  }
  return out;
}

ParsedRecord parse_log_record(std::string_view raw) {
  json obj = json::parse(raw.begin(), raw.end(), nullptr, /*allow_exceptions=*/false);
  if (obj.is_discarded()) throw Error(ErrorCode::MalformedJson, "unparseable JSON");
  return parse_log_record_json(obj);
}

json to_json(const LogRecord& r) {
  return json{
      {"eventType", r.eventType},
      {"appName", r.appName},
      {"url", r.url},
      {"groupedUrl", r.groupedUrl},
      {"urlCategory", r.urlCategory},
      {"targetEndpoint", r.targetEndpoint},
      {"timestamp", r.timestamp},
      {"responseTime", r.responseTime},
      {"statusCode", r.statusCode},
      {"method", r.method},
  };
}

std::string serialize_log_record(const LogRecord& record) { return to_json(record).dump(); }

}  // namespace gruwatch::ingest
