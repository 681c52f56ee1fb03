// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/error.hpp"

namespace gruwatch {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::MalformedJson: return "MalformedJson";
    case ErrorCode::MissingField: return "MissingField";
    case ErrorCode::RangeViolation: return "RangeViolation";
    case ErrorCode::PayloadTooLarge: return "PayloadTooLarge";
    case ErrorCode::FileUnreadable: return "FileUnreadable";
    case ErrorCode::InvalidConfig: return "InvalidConfig";
    case ErrorCode::RegistryEmpty: return "RegistryEmpty";
    case ErrorCode::EmptyTrainingSet: return "EmptyTrainingSet";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::InsufficientData: return "InsufficientData";
    case ErrorCode::EmptyGrid: return "EmptyGrid";
    case ErrorCode::NonFiniteError: return "NonFiniteError";
    case ErrorCode::NoModel: return "NoModel";
    case ErrorCode::WindowTooOld: return "WindowTooOld";
    case ErrorCode::RetrainFailed: return "RetrainFailed";
    case ErrorCode::NotFlagged: return "NotFlagged";
    case ErrorCode::HistoryUnavailable: return "HistoryUnavailable";
    case ErrorCode::WebhookUnreachable: return "WebhookUnreachable";
    case ErrorCode::UnknownAlert: return "UnknownAlert";
    case ErrorCode::InvalidLabel: return "InvalidLabel";
    case ErrorCode::DocumentTooLarge: return "DocumentTooLarge";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::InvalidRange: return "InvalidRange";
    case ErrorCode::OutOfBounds: return "OutOfBounds";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
  }
  return "Unknown";
}

}  // namespace gruwatch
