// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

namespace gruwatch::store {

/// Opaque byte payloads keyed by slash-separated paths ("models/3.json").
class BlobStore {
 public:
  virtual ~BlobStore() = default;

  virtual void put(const std::string& key, const std::string& bytes) = 0;
  virtual std::optional<std::string> get(const std::string& key) const = 0;
  virtual bool exists(const std::string& key) const = 0;
  /// Keys starting with `prefix`, ascending.
  virtual std::vector<std::string> list(const std::string& prefix) const = 0;
  virtual bool remove(const std::string& key) = 0;
};

class MemoryBlobStore final : public BlobStore {
 public:
  void put(const std::string& key, const std::string& bytes) override;
  std::optional<std::string> get(const std::string& key) const override;
  bool exists(const std::string& key) const override;
  std::vector<std::string> list(const std::string& prefix) const override;
  bool remove(const std::string& key) override;

 private:
  mutable std::mutex mutex_;
  std::map<std::string, std::string> blobs_;
};

class FileBlobStore final : public BlobStore {
 public:
  explicit FileBlobStore(std::filesystem::path root);

  void put(const std::string& key, const std::string& bytes) override;
  std::optional<std::string> get(const std::string& key) const override;
  bool exists(const std::string& key) const override;
  std::vector<std::string> list(const std::string& prefix) const override;
  bool remove(const std::string& key) override;

 private:
  std::filesystem::path path_of(const std::string& key) const;

  std::filesystem::path root_;
  mutable std::mutex mutex_;
};

/// Atomic whole-file write (temporary file + rename).
void write_file_atomically(const std::filesystem::path& path, const std::string& bytes);

}  // namespace gruwatch::store
