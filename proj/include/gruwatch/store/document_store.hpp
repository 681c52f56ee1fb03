// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace gruwatch::store {

inline constexpr std::size_t kDocumentLimitBytes = 1'000'000;

/// Serialized size of a document as it would be stored.
std::size_t document_size(const nlohmann::json& doc);

/// Keyed JSON documents grouped in collections. Every write is checked
/// against the 1 MB document limit (DocumentTooLarge).
class DocumentStore {
 public:
  virtual ~DocumentStore() = default;

  virtual void put(const std::string& collection, const std::string& id, const nlohmann::json& doc) = 0;
  virtual std::optional<nlohmann::json> get(const std::string& collection, const std::string& id) const = 0;
  /// Ids in the collection, ascending.
  virtual std::vector<std::string> list(const std::string& collection) const = 0;
  virtual bool remove(const std::string& collection, const std::string& id) = 0;

  /// Throws NotFound.
  nlohmann::json require(const std::string& collection, const std::string& id) const;
};

class MemoryDocumentStore final : public DocumentStore {
 public:
  void put(const std::string& collection, const std::string& id, const nlohmann::json& doc) override;
  std::optional<nlohmann::json> get(const std::string& collection, const std::string& id) const override;
  std::vector<std::string> list(const std::string& collection) const override;
  bool remove(const std::string& collection, const std::string& id) override;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::map<std::string, std::string>> data_;
};

/// One file per document: <root>/<collection>/<id>.json, written through a
/// temporary file and renamed so readers never see a partial document.
class FileDocumentStore final : public DocumentStore {
 public:
  explicit FileDocumentStore(std::filesystem::path root);

  void put(const std::string& collection, const std::string& id, const nlohmann::json& doc) override;
  std::optional<nlohmann::json> get(const std::string& collection, const std::string& id) const override;
  std::vector<std::string> list(const std::string& collection) const override;
  bool remove(const std::string& collection, const std::string& id) override;

  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path path_of(const std::string& collection, const std::string& id) const;

  std::filesystem::path root_;
  mutable std::mutex mutex_;
};

/// Rejects ids and collection names that could escape the store root.
void check_name(const std::string& name);

}  // namespace gruwatch::store
