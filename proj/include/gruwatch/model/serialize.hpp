// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <string>

#include <json.hpp>

#include "gruwatch/model/gru_autoencoder.hpp"

namespace gruwatch::model {

/// {"format", "config", "inputWidth", "registryVersion", "modelVersion",
///  "trainedAt", "tensors": [{"name", "shape": [rows, cols], "data": [...]}]}
nlohmann::json to_json(const GruAutoencoder& model);

/// Rebuilds a model; tensor names and shapes must match the layout implied by
/// the stored config. Throws ShapeMismatch / MalformedJson.
GruAutoencoder model_from_json(const nlohmann::json& j);

std::string serialize_model(const GruAutoencoder& model);
GruAutoencoder deserialize_model(const std::string& blob);

}  // namespace gruwatch::model
