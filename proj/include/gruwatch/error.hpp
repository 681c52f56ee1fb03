// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace gruwatch {

enum class ErrorCode {
  // ingest
  MalformedJson,
  MissingField,
  RangeViolation,
  PayloadTooLarge,
  FileUnreadable,
  InvalidConfig,
  // features
  RegistryEmpty,
  EmptyTrainingSet,
  // model
  ShapeMismatch,
  InsufficientData,
  EmptyGrid,
  // likelihood
  NonFiniteError,
  // orchestrator
  NoModel,
  WindowTooOld,
  RetrainFailed,
  // alerting
  NotFlagged,
  HistoryUnavailable,
  WebhookUnreachable,
  UnknownAlert,
  InvalidLabel,
  // storage
  DocumentTooLarge,
  NotFound,
  // evalbench
  IndexOutOfRange,
  InvalidRange,
  OutOfBounds,
  EmptyMatrix,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure raised by the library carries a stable code so callers
/// (HTTP handlers, the CLI, tests) can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& detail)
      : std::runtime_error(std::string(to_string(code)) + ": " + detail),
        code_(code),
        detail_(detail) {}

  ErrorCode code() const noexcept { return code_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorCode code_;
  std::string detail_;
};

}  // namespace gruwatch
