// SPDX-License-Identifier: Apache-2.0
#include "gruwatch/store/blob_store.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "gruwatch/error.hpp"
#include "gruwatch/store/document_store.hpp"

namespace gruwatch::store {

namespace fs = std::filesystem;

void write_file_atomically(const fs::path& path, const std::string& bytes) {
  fs::create_directories(path.parent_path());
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::FileUnreadable, "cannot write " + tmp.string());
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error(ErrorCode::FileUnreadable, "short write to " + tmp.string());
  }
  fs::rename(tmp, path);
}

namespace {

// Keys are '/'-separated segments; each segment obeys the document name rules
// so both backends accept exactly the same keys.
void check_key(const std::string& key) {
  std::size_t begin = 0;
  while (begin <= key.size()) {
    const std::size_t end = std::min(key.find('/', begin), key.size());
    check_name(key.substr(begin, end - begin));
    begin = end + 1;
  }
}

}  // namespace

void MemoryBlobStore::put(const std::string& key, const std::string& bytes) {
  check_key(key);
  std::lock_guard lock(mutex_);
  blobs_[key] = bytes;
}

std::optional<std::string> MemoryBlobStore::get(const std::string& key) const {
  std::lock_guard lock(mutex_);
  auto it = blobs_.find(key);
  if (it == blobs_.end()) return std::nullopt;
  return it->second;
}

bool MemoryBlobStore::exists(const std::string& key) const {
  std::lock_guard lock(mutex_);
  return blobs_.count(key) > 0;
}

std::vector<std::string> MemoryBlobStore::list(const std::string& prefix) const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> keys;
  for (auto it = blobs_.lower_bound(prefix); it != blobs_.end() && it->first.starts_with(prefix); ++it) {
    keys.push_back(it->first);
  }
  return keys;
}

bool MemoryBlobStore::remove(const std::string& key) {
  std::lock_guard lock(mutex_);
  return blobs_.erase(key) > 0;
}

FileBlobStore::FileBlobStore(fs::path root) : root_(std::move(root)) { fs::create_directories(root_); }

fs::path FileBlobStore::path_of(const std::string& key) const {
  check_key(key);
  return root_ / key;
}

void FileBlobStore::put(const std::string& key, const std::string& bytes) {
  const fs::path path = path_of(key);
  std::lock_guard lock(mutex_);
  write_file_atomically(path, bytes);
}

std::optional<std::string> FileBlobStore::get(const std::string& key) const {
  const fs::path path = path_of(key);
  std::lock_guard lock(mutex_);
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

bool FileBlobStore::exists(const std::string& key) const {
  const fs::path path = path_of(key);
  std::lock_guard lock(mutex_);
  return fs::is_regular_file(path);
}

std::vector<std::string> FileBlobStore::list(const std::string& prefix) const {
  std::lock_guard lock(mutex_);
  std::vector<std::string> keys;
  std::error_code ec;
  for (auto it = fs::recursive_directory_iterator(root_, ec); it != fs::recursive_directory_iterator(); ++it) {
    if (!it->is_regular_file() || it->path().extension() == ".tmp") continue;
    std::string key = fs::relative(it->path(), root_).generic_string();
    if (key.starts_with(prefix)) keys.push_back(std::move(key));
  }
  std::sort(keys.begin(), keys.end());
  return keys;
}

bool FileBlobStore::remove(const std::string& key) {
  const fs::path path = path_of(key);
  std::lock_guard lock(mutex_);
  return fs::remove(path);
}

}  // namespace gruwatch::store
