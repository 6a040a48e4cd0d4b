#include "paperchat/embedding_cache.hpp"

#include <mutex>
#include <sstream>

#include "json.hpp"
#include "paperchat/digest.hpp"
#include "paperchat/errors.hpp"

namespace paperchat {

namespace fs = std::filesystem;

std::string embedding_cache_key(std::string_view model_id, std::string_view text) {
  // Length-prefix the model id so ("ab","c") and ("a","bc") differ.
  std::string material = std::to_string(model_id.size());
  material += ':';
  material += model_id;
  material += text;
  return sha256_hex(material);
}

EmbeddingCache::EmbeddingCache(fs::path directory) : directory_(std::move(directory)) {
  std::error_code ec;
  fs::create_directories(*directory_, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create cache directory " + directory_->string());
  load_index();
  log_.open(*directory_ / "embeddings.log", std::ios::app | std::ios::binary);
  index_.open(*directory_ / "embeddings.idx", std::ios::app);
  if (!log_ || !index_) throw Error(ErrorCode::IoError, "cannot open embedding cache in " + directory_->string());
}

// Reads the index, then scans the log past the last indexed record so that
// records written without an index line (interrupted writer) are recovered.
void EmbeddingCache::load_index() {
  long long last = -1;
  {
    std::ifstream idx(*directory_ / "embeddings.idx");
    std::string key;
    long long offset = 0;
    while (idx >> key >> offset) {
      offsets_[key] = offset;
      last = std::max(last, offset);
    }
  }
  std::ifstream log(*directory_ / "embeddings.log", std::ios::binary);
  if (!log) return;
  log.seekg(last < 0 ? 0 : last);
  std::vector<std::pair<std::string, long long>> recovered;
  std::string line;
  for (long long pos = log.tellg(); std::getline(log, line); pos = log.tellg()) {
    auto record = nlohmann::json::parse(line, nullptr, false);
    if (record.is_discarded() || !record.contains("key")) continue;
    auto key = record["key"].get<std::string>();
    if (offsets_.try_emplace(key, pos).second) recovered.emplace_back(std::move(key), pos);
  }
  if (!recovered.empty()) {
    std::ofstream idx(*directory_ / "embeddings.idx", std::ios::app);
    for (const auto& [key, pos] : recovered) idx << key << ' ' << pos << '\n';
  }
}

std::optional<std::vector<double>> EmbeddingCache::read_record(long long offset, const std::string& key) const {
  std::ifstream log(*directory_ / "embeddings.log", std::ios::binary);
  log.seekg(offset);
  std::string line;
  if (!std::getline(log, line)) return std::nullopt;
  auto record = nlohmann::json::parse(line, nullptr, false);
  if (record.is_discarded() || record.value("key", std::string{}) != key || !record.contains("vector")) {
    return std::nullopt;
  }
  return record["vector"].get<std::vector<double>>();
}

std::optional<std::vector<double>> EmbeddingCache::get(const std::string& key) const {
  long long offset = -1;
  {
    std::shared_lock lock(mutex_);
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    if (auto it = offsets_.find(key); it != offsets_.end()) offset = it->second;
  }
  if (offset < 0 || !directory_) return std::nullopt;
  auto vector = read_record(offset, key);
  if (vector) {
    std::unique_lock lock(mutex_);
    entries_.try_emplace(key, *vector);
  }
  return vector;
}

void EmbeddingCache::put(const std::string& key, std::string_view model_id, const std::vector<double>& vector) {
  std::unique_lock lock(mutex_);
  if (offsets_.contains(key) || !entries_.try_emplace(key, vector).second) return;
  if (!directory_) return;
  const auto offset = static_cast<long long>(fs::file_size(*directory_ / "embeddings.log"));
  nlohmann::json record{{"key", key}, {"model_id", model_id}, {"vector", vector}};
  log_ << record.dump() << '\n';
  log_.flush();
  index_ << key << ' ' << offset << '\n';
  index_.flush();
  offsets_[key] = offset;
}

std::size_t EmbeddingCache::size() const {
  std::shared_lock lock(mutex_);
  std::size_t n = offsets_.size();
  for (const auto& [key, _] : entries_) n += offsets_.contains(key) ? 0 : 1;
  return n;
}

}  // namespace paperchat
