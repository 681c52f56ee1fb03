// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/store/document_store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gruwatch/error.hpp"
#include "gruwatch/store/blob_store.hpp"

namespace gruwatch::store {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string encode(const json& doc) {
  std::string bytes = doc.dump();
  if (bytes.size() > kDocumentLimitBytes) {
    throw Error(ErrorCode::DocumentTooLarge,
                std::to_string(bytes.size()) + " bytes exceeds the " + std::to_string(kDocumentLimitBytes) + " byte limit");
  }
  return bytes;
}

}  // namespace

std::size_t document_size(const json& doc) { return doc.dump().size(); }

void check_name(const std::string& name) {
  if (name.empty() || name == "." || name == ".." || name.find('/') != std::string::npos ||
      name.find('\\') != std::string::npos || name.find('\0') != std::string::npos) {
    throw Error(ErrorCode::InvalidConfig, "invalid store name '" + name + "'");
  }
}

json DocumentStore::require(const std::string& collection, const std::string& id) const {
  auto doc = get(collection, id);
  if (!doc) throw Error(ErrorCode::NotFound, collection + "/" + id);
  return *doc;
}

void MemoryDocumentStore::put(const std::string& collection, const std::string& id, const json& doc) {
  check_name(collection);
  check_name(id);
  std::string bytes = encode(doc);
  std::lock_guard lock(mutex_);
  data_[collection][id] = std::move(bytes);
}

std::optional<json> MemoryDocumentStore::get(const std::string& collection, const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto c = data_.find(collection);
  if (c == data_.end()) return std::nullopt;
  auto d = c->second.find(id);
  if (d == c->second.end()) return std::nullopt;
  return json::parse(d->second);
}

std::vector<std::string> MemoryDocumentStore::list(const std::string& collection) const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  auto c = data_.find(collection);
  if (c == data_.end()) return ids;
  for (const auto& [id, _] : c->second) ids.push_back(id);
  return ids;
}

bool MemoryDocumentStore::remove(const std::string& collection, const std::string& id) {
  std::lock_guard lock(mutex_);
  auto c = data_.find(collection);
  return c != data_.end() && c->second.erase(id) > 0;
}

FileDocumentStore::FileDocumentStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path FileDocumentStore::path_of(const std::string& collection, const std::string& id) const {
  check_name(collection);
  check_name(id);
  return root_ / collection / (id + ".json");
}

void FileDocumentStore::put(const std::string& collection, const std::string& id, const json& doc) {
  const fs::path path = path_of(collection, id);
  const std::string bytes = encode(doc);
  std::lock_guard lock(mutex_);
  write_file_atomically(path, bytes);
}

std::optional<json> FileDocumentStore::get(const std::string& collection, const std::string& id) const {
  const fs::path path = path_of(collection, id);
  std::lock_guard lock(mutex_);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  auto doc = json::parse(buf.str(), nullptr, false);
  if (doc.is_discarded()) throw Error(ErrorCode::MalformedJson, "corrupt document " + path.string());
  return doc;
}

std::vector<std::string> FileDocumentStore::list(const std::string& collection) const {
  check_name(collection);
  std::lock_guard lock(mutex_);
  std::vector<std::string> ids;
  const fs::path dir = root_ / collection;
  std::error_code ec;
  for (const auto& entry : fs::directory_iterator(dir, ec)) {
    if (entry.path().extension() == ".json") ids.push_back(entry.path().stem().string());
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

bool FileDocumentStore::remove(const std::string& collection, const std::string& id) {
  const fs::path path = path_of(collection, id);
  std::lock_guard lock(mutex_);
  return fs::remove(path);
}

}  // namespace gruwatch::store
