// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/model/serialize.hpp"

#include "gruwatch/error.hpp"

namespace gruwatch::model {

namespace {
constexpr const char* kFormat = "gruwatch.gru-autoencoder.v1";
}

nlohmann::json to_json(const GruAutoencoder& model) {
  nlohmann::json tensors = nlohmann::json::array();
  const auto params = model.parameters();
  for (const auto& slot : model.layout()) {
    tensors.push_back({
        {"name", slot.name},
        {"shape", {slot.rows, slot.cols}},
        {"data", std::vector<double>(params.begin() + static_cast<std::ptrdiff_t>(slot.offset),
                                     params.begin() + static_cast<std::ptrdiff_t>(slot.offset + slot.size()))},
    });
  }
  return {
      {"format", kFormat},
      {"config", model.config().to_json()},
      {"inputWidth", model.input_width()},
      {"registryVersion", model.registryVersion},
      {"modelVersion", model.modelVersion},
      {"trainedAt", model.trainedAt},
      {"tensors", std::move(tensors)},
  };
}

GruAutoencoder model_from_json(const nlohmann::json& j) {
  try {
    if (j.value("format", std::string()) != kFormat) {
      throw Error(ErrorCode::MalformedJson, "unknown model format");
    }
    GruAutoencoder model(TrainingConfig::from_json(j.at("config")), j.at("inputWidth").get<std::size_t>());
    model.registryVersion = j.at("registryVersion").get<std::int64_t>();
    model.modelVersion = j.at("modelVersion").get<std::int64_t>();
    model.trainedAt = j.at("trainedAt").get<std::int64_t>();

    const auto& tensors = j.at("tensors");
    if (tensors.size() != model.layout().size()) throw Error(ErrorCode::ShapeMismatch, "tensor count");
    auto params = model.parameters();
    for (std::size_t i = 0; i < tensors.size(); ++i) {
      const auto& slot = model.layout()[i];
      const auto& t = tensors[i];
      if (t.at("name").get<std::string>() != slot.name || t.at("shape").at(0).get<std::size_t>() != slot.rows ||
          t.at("shape").at(1).get<std::size_t>() != slot.cols || t.at("data").size() != slot.size()) {
        throw Error(ErrorCode::ShapeMismatch, "tensor " + slot.name + " does not match the layout");
      }
      std::size_t k = slot.offset;
      for (const auto& v : t.at("data")) params[k++] = v.get<double>();
    }
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedJson, e.what());
  }
}

std::string serialize_model(const GruAutoencoder& model) { return to_json(model).dump(); }

GruAutoencoder deserialize_model(const std::string& blob) {
  auto j = nlohmann::json::parse(blob, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::MalformedJson, "model blob is not JSON");
  return model_from_json(j);
}

}  // namespace gruwatch::model
