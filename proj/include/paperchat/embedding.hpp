#pragma once

#include <atomic>
#include <chrono>
#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paperchat/tier.hpp"

namespace paperchat {

class EmbeddingCache;

/// Embedding model ladder, cheapest first. Concrete provider model ids are
/// bound per deployment; LocalHash is the offline feature-hashing model.
enum class EmbeddingModelClass { Ada, Babbage, Curie, Davinci, LocalHash };

std::string_view to_string(EmbeddingModelClass model);
std::optional<EmbeddingModelClass> parse_embedding_model(std::string_view name);

/// Published linear-probe accuracy (%) for the ladder; none for LocalHash.
std::optional<double> reported_linear_probe_accuracy(EmbeddingModelClass model);

/// Position on the capability ladder (Ada = 0 ... Davinci = 3); LocalHash
/// has no rank.
std::optional<int> capability_rank(EmbeddingModelClass model);

EmbeddingModelClass select_embedding_model(AssistanceTier tier);

struct Embedding {
  std::vector<double> vector;
  std::string model_id;

  std::size_t dimension() const noexcept { return vector.size(); }
  bool operator==(const Embedding&) const = default;
};

/// Feature-hashes token counts (lower-cased) into `dimension` buckets and
/// L2-normalizes. Throws EmptyText for text without tokens and
/// InvalidArgument for dimension < 8.
Embedding local_hash_embed(std::string_view text, std::size_t dimension);

/// Batch form; each text is embedded independently (OpenMP over texts).
std::vector<Embedding> local_hash_embed_batch(std::span<const std::string> texts,
                                              std::size_t dimension);

/// Provider wire contract: model id + texts in, one equal-length vector per
/// text out.
class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual std::vector<std::vector<double>> embed(const std::string& model_id,
                                                 std::span<const std::string> texts) = 0;
  virtual std::string name() const = 0;
};

/// Offline provider. Model ids have the form "local-hash-<dimension>".
class LocalHashProvider final : public EmbeddingProvider {
 public:
  std::vector<std::vector<double>> embed(const std::string& model_id,
                                         std::span<const std::string> texts) override;
  std::string name() const override { return "local-hash"; }
};

/// OpenAI-compatible `/v1/embeddings` client.
class OpenAIEmbeddingProvider final : public EmbeddingProvider {
 public:
  OpenAIEmbeddingProvider(std::string api_key, std::string base_url = "https://api.openai.com");
  std::vector<std::vector<double>> embed(const std::string& model_id,
                                         std::span<const std::string> texts) override;
  std::string name() const override { return "openai"; }

 private:
  std::string api_key_;
  std::string base_url_;
};

struct EmbeddingBinding {
  std::shared_ptr<EmbeddingProvider> provider;
  std::string model_id;
};

struct EmbeddingStats {
  std::size_t provider_calls = 0;
  std::size_t texts_embedded = 0;
  std::size_t cache_hits = 0;
};

/// Routes embedding requests for a model class to its provider binding,
/// consulting a content-addressed cache first.
class EmbeddingEngine {
 public:
  EmbeddingEngine() = default;

  void bind(EmbeddingModelClass model, EmbeddingBinding binding);
  bool is_bound(EmbeddingModelClass model) const;
  const std::string& model_id(EmbeddingModelClass model) const;

  void set_cache(std::shared_ptr<EmbeddingCache> cache) { cache_ = std::move(cache); }
  void set_retry(int max_attempts, std::chrono::milliseconds initial_backoff) {
    max_attempts_ = max_attempts;
    backoff_ = initial_backoff;
  }

  /// One Embedding per text, in input order. Throws InvalidArgument on an
  /// empty batch, DimensionMismatch if the provider returns ragged vectors,
  /// ProviderError after retries.
  std::vector<Embedding> embed_texts(EmbeddingModelClass model, std::span<const std::string> texts);

  EmbeddingStats stats() const;

 private:
  const EmbeddingBinding& binding(EmbeddingModelClass model) const;

  std::map<EmbeddingModelClass, EmbeddingBinding> bindings_;
  std::shared_ptr<EmbeddingCache> cache_;
  int max_attempts_ = 3;
  std::chrono::milliseconds backoff_{200};
  std::atomic<std::size_t> provider_calls_{0};
  std::atomic<std::size_t> texts_embedded_{0};
  std::atomic<std::size_t> cache_hits_{0};
};

}  // namespace paperchat
