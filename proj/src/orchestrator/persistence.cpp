// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <sstream>

#include "gruwatch/error.hpp"
#include "gruwatch/model/serialize.hpp"
#include "gruwatch/orchestrator/detector.hpp"

namespace gruwatch::orchestrator {

using nlohmann::json;

namespace {

constexpr const char* kStateCollection = "state";
constexpr const char* kAssessmentCollection = "assessments";

// Stores `doc` as a document, or as a blob referenced from a stub document
// when it exceeds the document limit.
void put_spilling(store::DocumentStore& docs, store::BlobStore& blobs, const std::string& id, const json& doc) {
  if (store::document_size(doc) <= store::kDocumentLimitBytes) {
    docs.put(kStateCollection, id, doc);
    return;
  }
  const std::string key = "state/" + id + ".json";
  blobs.put(key, doc.dump());
  docs.put(kStateCollection, id, json{{"blob", key}});
}

std::optional<json> get_spilled(const store::DocumentStore& docs, const store::BlobStore& blobs, const std::string& id) {
  auto doc = docs.get(kStateCollection, id);
  if (!doc) return std::nullopt;
  if (doc->is_object() && doc->size() == 1 && doc->contains("blob")) {
    auto bytes = blobs.get((*doc)["blob"].get<std::string>());
    if (!bytes) throw Error(ErrorCode::NotFound, "spilled state blob for " + id);
    return json::parse(*bytes);
  }
  return doc;
}

json optional_time(const std::optional<std::int64_t>& t) { return t ? json(*t) : json(nullptr); }

std::optional<std::int64_t> read_optional_time(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<std::int64_t>();
}

}  // namespace

json DetectorCounters::to_json() const {
  return {{"ticks", ticks},
          {"assessments", assessments},
          {"skippedWindows", skippedWindows},
          {"tickFailures", tickFailures},
          {"staleRescored", staleRescored},
          {"windowsTooOld", windowsTooOld},
          {"retrains", retrains},
          {"retrainFailures", retrainFailures},
          {"onlineSteps", onlineSteps}};
}

DetectorCounters DetectorCounters::from_json(const json& j) {
  DetectorCounters c;
  c.ticks = j.value("ticks", 0ULL);
  c.assessments = j.value("assessments", 0ULL);
  c.skippedWindows = j.value("skippedWindows", 0ULL);
  c.tickFailures = j.value("tickFailures", 0ULL);
  c.staleRescored = j.value("staleRescored", 0ULL);
  c.windowsTooOld = j.value("windowsTooOld", 0ULL);
  c.retrains = j.value("retrains", 0ULL);
  c.retrainFailures = j.value("retrainFailures", 0ULL);
  c.onlineSteps = j.value("onlineSteps", 0ULL);
  return c;
}

void Detector::save(store::DocumentStore& docs, store::BlobStore& blobs) {
  install_pending(lastTick_);

  json schedule{{"lastClosed", optional_time(lastClosed_)},
                {"lastScored", optional_time(lastScored_)},
                {"firstScored", optional_time(firstScored_)},
                {"lastTick", lastTick_},
                {"lastRetrain", lastRetrain_},
                {"hasModel", hasModel_},
                {"counters", counters_.to_json()}};

  if (hasModel_) {
    const std::string model_bytes = model::serialize_model(model_);
    blobs.put("models/" + std::to_string(model_.modelVersion) + ".json", model_bytes);
    blobs.put("models/current.json", model_bytes);
    put_spilling(docs, blobs, "registry", registry_.to_json());
  }
  put_spilling(docs, blobs, "likelihood", likelihood_.to_json());

  std::ostringstream frames;
  for (const auto& [start, w] : windows_.closed()) frames << features::to_json(w).dump() << '\n';
  blobs.put("frames/windows.jsonl", frames.str());

  std::ostringstream raw;
  for (const auto& [start, entries] : windows_.raw_windows()) {
    for (const auto& e : entries) {
      raw << json{{"source", e.source}, {"record", ingest::to_json(e.record)}}.dump() << '\n';
    }
  }
  blobs.put("frames/raw.jsonl", raw.str());

  for (const auto& key : unsaved_) {
    const auto dash = key.find("-r");
    const std::int64_t start = std::stoll(key.substr(0, dash));
    const auto revision = static_cast<std::size_t>(std::stoll(key.substr(dash + 2)));
    auto it = assessments_.find(start);
    if (it != assessments_.end() && revision < it->second.size()) {
      docs.put(kAssessmentCollection, key, likelihood::to_json(it->second[revision]));
    }
  }
  unsaved_.clear();

  // Schedule last: a reader that sees it also sees everything it refers to.
  docs.put(kStateCollection, "detector", schedule);
}

bool Detector::load(const store::DocumentStore& docs, const store::BlobStore& blobs) {
  auto schedule = docs.get(kStateCollection, "detector");
  if (!schedule) return false;

  lastClosed_ = read_optional_time(*schedule, "lastClosed");
  lastScored_ = read_optional_time(*schedule, "lastScored");
  firstScored_ = read_optional_time(*schedule, "firstScored");
  lastTick_ = schedule->value("lastTick", std::int64_t{0});
  lastRetrain_ = schedule->value("lastRetrain", std::int64_t{0});
  counters_ = DetectorCounters::from_json(schedule->value("counters", json::object()));

  hasModel_ = schedule->value("hasModel", false);
  if (hasModel_) {
    auto model_bytes = blobs.get("models/current.json");
    auto registry_doc = get_spilled(docs, blobs, "registry");
    if (!model_bytes || !registry_doc) throw Error(ErrorCode::NotFound, "saved model or registry missing");
    registry_ = features::FeatureRegistry::from_json(*registry_doc);
    model_ = model::deserialize_model(*model_bytes);
    if (model_.registryVersion != registry_.version()) {
      throw Error(ErrorCode::ShapeMismatch, "saved model and registry versions disagree");
    }
    model_.set_learning_rate(config_.onlineLearningRate);
  }
  if (auto l = get_spilled(docs, blobs, "likelihood")) likelihood_ = likelihood::ErrorDistributionState::from_json(*l);

  windows_ = WindowStore(config_.window_ms(), config_.perSourceKeys);
  if (auto frames = blobs.get("frames/windows.jsonl")) {
    std::istringstream in(*frames);
    for (std::string line; std::getline(in, line);) {
      if (!line.empty()) windows_.restore_closed(features::aggregation_window_from_json(json::parse(line)));
    }
  }
  if (auto raw = blobs.get("frames/raw.jsonl")) {
    std::istringstream in(*raw);
    for (std::string line; std::getline(in, line);) {
      if (line.empty()) continue;
      const json j = json::parse(line);
      windows_.add(ingest::parse_log_record_json(j.at("record")).record, j.value("source", std::string{}));
    }
  }

  assessments_.clear();
  for (const auto& id : docs.list(kAssessmentCollection)) {
    auto a = likelihood::assessment_from_json(docs.require(kAssessmentCollection, id));
    if (lastClosed_ && a.windowStart < *lastClosed_ + config_.window_ms() - config_.retention_ms()) continue;
    auto& chain = assessments_[a.windowStart];
    chain.push_back(std::move(a));
  }
  for (auto& [start, chain] : assessments_) {
    std::sort(chain.begin(), chain.end(), [](const auto& x, const auto& y) { return x.revision < y.revision; });
  }
  unsaved_.clear();
  return true;
}

}  // namespace gruwatch::orchestrator
