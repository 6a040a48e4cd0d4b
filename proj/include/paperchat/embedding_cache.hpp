#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace paperchat {

/// Cache key: SHA-256 over (model_id, text).
std::string embedding_cache_key(std::string_view model_id, std::string_view text);

/// Content-addressed embedding store. With a directory it persists an
/// append-only record log (`embeddings.log`, one JSON record per line) and
/// an index of "<key> <byte offset>" lines (`embeddings.idx`); records are
/// read from the log on first use. Without a directory it is memory-only.
/// Single writer, many readers.
class EmbeddingCache {
 public:
  EmbeddingCache() = default;
  explicit EmbeddingCache(std::filesystem::path directory);

  std::optional<std::vector<double>> get(const std::string& key) const;
  void put(const std::string& key, std::string_view model_id, const std::vector<double>& vector);
  std::size_t size() const;

 private:
  void load_index();
  std::optional<std::vector<double>> read_record(long long offset, const std::string& key) const;

  std::optional<std::filesystem::path> directory_;
  mutable std::shared_mutex mutex_;
  // Vectors already in memory (written or read this session).
  mutable std::unordered_map<std::string, std::vector<double>> entries_;
  // Byte offset of each key's record in the log.
  std::unordered_map<std::string, long long> offsets_;
  std::ofstream log_;
  std::ofstream index_;
};

}  // namespace paperchat
