// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <string>
#include <string_view>

#include <json.hpp>

namespace gruwatch::ingest {

/// One telemetry event emitted by a service agent for a single HTTP request.
struct LogRecord {
  std::string eventType;
  std::string appName;
  std::string url;
  std::string groupedUrl;
  std::string urlCategory;
  std::string targetEndpoint;
  std::int64_t timestamp = 0;  // ms since epoch, UTC
  double responseTime = 0.0;   // ms
  int statusCode = 0;
  std::string method;

  bool operator==(const LogRecord&) const = default;
};

struct ParsedRecord {
  LogRecord record;
  std::size_t unknownFields = 0;
};

/// Verbs outside GET/POST/PUT/DELETE/PATCH/HEAD/OPTIONS are kept verbatim;
/// this only reports whether the verb is one of the common set.
bool is_known_method(std::string_view method) noexcept;

/// Parses and validates a single JSON object.
/// Throws Error{MalformedJson | MissingField | RangeViolation}.
ParsedRecord parse_log_record(std::string_view raw);

/// Same as parse_log_record for an already-decoded JSON value.
ParsedRecord parse_log_record_json(const nlohmann::json& object);

nlohmann::json to_json(const LogRecord& record);
std::string serialize_log_record(const LogRecord& record);

}  // namespace gruwatch::ingest
