#include "paperchat/embedding.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <unordered_map>

#include "http_util.hpp"
#include "json.hpp"
#include "paperchat/chunking.hpp"
#include "paperchat/embedding_cache.hpp"
#include "paperchat/errors.hpp"
#include "retry.hpp"

namespace paperchat {

std::string_view to_string(EmbeddingModelClass model) {
  switch (model) {
    case EmbeddingModelClass::Ada: return "ada";
    case EmbeddingModelClass::Babbage: return "babbage";
    case EmbeddingModelClass::Curie: return "curie";
    case EmbeddingModelClass::Davinci: return "davinci";
    case EmbeddingModelClass::LocalHash: return "local-hash";
  }
  return "ada";
}

std::optional<EmbeddingModelClass> parse_embedding_model(std::string_view name) {
  for (auto m : {EmbeddingModelClass::Ada, EmbeddingModelClass::Babbage, EmbeddingModelClass::Curie,
                 EmbeddingModelClass::Davinci, EmbeddingModelClass::LocalHash}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::optional<double> reported_linear_probe_accuracy(EmbeddingModelClass model) {
  switch (model) {
    case EmbeddingModelClass::Ada: return 89.30;
    case EmbeddingModelClass::Babbage: return 91.10;
    case EmbeddingModelClass::Curie: return 91.50;
    case EmbeddingModelClass::Davinci: return 92.20;
    case EmbeddingModelClass::LocalHash: return std::nullopt;
  }
  return std::nullopt;
}

std::optional<int> capability_rank(EmbeddingModelClass model) {
  switch (model) {
    case EmbeddingModelClass::Ada: return 0;
    case EmbeddingModelClass::Babbage: return 1;
    case EmbeddingModelClass::Curie: return 2;
    case EmbeddingModelClass::Davinci: return 3;
    case EmbeddingModelClass::LocalHash: return std::nullopt;
  }
  return std::nullopt;
}

EmbeddingModelClass select_embedding_model(AssistanceTier tier) {
  return tier == AssistanceTier::Extreme ? EmbeddingModelClass::Davinci : EmbeddingModelClass::Ada;
}

namespace {

// 64-bit FNV-1a over the lower-cased token.
std::uint64_t token_hash(std::string_view token) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : token) {
    h ^= static_cast<std::uint64_t>(c < 0x80 ? std::tolower(c) : c);
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

Embedding local_hash_embed(std::string_view text, std::size_t dimension) {
  if (dimension < 8) throw Error(ErrorCode::InvalidArgument, "local hash dimension must be >= 8");
  const auto spans = token_spans(text);
  if (spans.empty()) throw Error(ErrorCode::EmptyText, "cannot embed text without tokens");

  std::vector<double> v(dimension, 0.0);
  for (const auto& s : spans) v[token_hash(text.substr(s.begin, s.end - s.begin)) % dimension] += 1.0;
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  for (double& x : v) x /= norm;
  return Embedding{std::move(v), "local-hash-" + std::to_string(dimension)};
}

std::vector<Embedding> local_hash_embed_batch(std::span<const std::string> texts, std::size_t dimension) {
  std::vector<Embedding> out(texts.size());
  // Exceptions must not cross the OpenMP region; capture the first one.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic, 16)
  for (std::size_t i = 0; i < texts.size(); ++i) {
    try {
      out[i] = local_hash_embed(texts[i], dimension);
    } catch (...) {
#pragma omp critical(paperchat_hash_embed_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

std::vector<std::vector<double>> LocalHashProvider::embed(const std::string& model_id,
                                                          std::span<const std::string> texts) {
  constexpr std::string_view prefix = "local-hash-";
  if (!model_id.starts_with(prefix)) {
    throw Error(ErrorCode::InvalidArgument, "local hash model id must look like local-hash-<dim>: " + model_id);
  }
  std::size_t dim = 0;
  try {
    dim = std::stoul(model_id.substr(prefix.size()));
  } catch (const std::exception&) {
    throw Error(ErrorCode::InvalidArgument, "bad local hash model id: " + model_id);
  }
  auto embeddings = local_hash_embed_batch(texts, dim);
  std::vector<std::vector<double>> out;
  out.reserve(embeddings.size());
  for (auto& e : embeddings) out.push_back(std::move(e.vector));
  return out;
}

OpenAIEmbeddingProvider::OpenAIEmbeddingProvider(std::string api_key, std::string base_url)
    : api_key_(std::move(api_key)), base_url_(std::move(base_url)) {}

std::vector<std::vector<double>> OpenAIEmbeddingProvider::embed(const std::string& model_id,
                                                                std::span<const std::string> texts) {
  if (api_key_.empty()) throw Error(ErrorCode::AuthError, "OPENAI_API_KEY is not set");
  httplib::Client client(base_url_);
  client.set_read_timeout(60, 0);
  nlohmann::json body{{"model", model_id}, {"input", texts}};
  auto res = client.Post("/v1/embeddings", detail::bearer(api_key_), body.dump(), "application/json");
  detail::check_provider_response(res, "embeddings");

  auto reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("data") || !reply["data"].is_array()) {
    throw Error(ErrorCode::ProviderError, "embeddings: malformed response");
  }
  std::vector<std::vector<double>> out(texts.size());
  for (const auto& item : reply["data"]) {
    const auto index = item.value("index", std::size_t{0});
    if (index >= out.size()) throw Error(ErrorCode::ProviderError, "embeddings: index out of range");
    out[index] = item.at("embedding").get<std::vector<double>>();
  }
  return out;
}

void EmbeddingEngine::bind(EmbeddingModelClass model, EmbeddingBinding binding) {
  if (!binding.provider) throw Error(ErrorCode::InvalidArgument, "embedding binding without provider");
  bindings_[model] = std::move(binding);
}

bool EmbeddingEngine::is_bound(EmbeddingModelClass model) const { return bindings_.contains(model); }

const EmbeddingBinding& EmbeddingEngine::binding(EmbeddingModelClass model) const {
  auto it = bindings_.find(model);
  if (it == bindings_.end()) {
    throw Error(ErrorCode::InvalidArgument, "no provider bound for embedding model " + std::string(to_string(model)));
  }
  return it->second;
}

const std::string& EmbeddingEngine::model_id(EmbeddingModelClass model) const { return binding(model).model_id; }

EmbeddingStats EmbeddingEngine::stats() const {
  return EmbeddingStats{provider_calls_.load(), texts_embedded_.load(), cache_hits_.load()};
}

std::vector<Embedding> EmbeddingEngine::embed_texts(EmbeddingModelClass model, std::span<const std::string> texts) {
  if (texts.empty()) throw Error(ErrorCode::InvalidArgument, "embed_texts needs at least one text");
  const EmbeddingBinding& b = binding(model);

  std::vector<std::optional<std::vector<double>>> vectors(texts.size());
  std::vector<std::string> keys(texts.size());
  // Distinct uncached texts -> positions waiting on them.
  std::unordered_map<std::string, std::vector<std::size_t>> pending;
  std::vector<std::string> misses;
  for (std::size_t i = 0; i < texts.size(); ++i) {
    keys[i] = embedding_cache_key(b.model_id, texts[i]);
    if (cache_) {
      if (auto hit = cache_->get(keys[i])) {
        vectors[i] = std::move(*hit);
        ++cache_hits_;
        continue;
      }
    }
    auto [it, inserted] = pending.try_emplace(keys[i]);
    if (inserted) misses.push_back(texts[i]);
    it->second.push_back(i);
  }

  constexpr std::size_t kBatch = 256;
  for (std::size_t first = 0; first < misses.size(); first += kBatch) {
    const std::size_t count = std::min(kBatch, misses.size() - first);
    std::span<const std::string> batch(misses.data() + first, count);
    auto result = detail::with_retries(max_attempts_, backoff_, [&] {
      ++provider_calls_;
      return b.provider->embed(b.model_id, batch);
    });
    if (result.size() != count) {
      throw Error(ErrorCode::DimensionMismatch, "provider returned " + std::to_string(result.size()) +
                                                    " vectors for " + std::to_string(count) + " texts");
    }
    texts_embedded_ += count;
    for (std::size_t j = 0; j < count; ++j) {
      for (double x : result[j]) {
        if (!std::isfinite(x)) throw Error(ErrorCode::ProviderError, "provider returned a non-finite embedding");
      }
      const std::string key = embedding_cache_key(b.model_id, batch[j]);
      if (cache_) cache_->put(key, b.model_id, result[j]);
      for (std::size_t pos : pending[key]) vectors[pos] = result[j];
    }
  }

  std::vector<Embedding> out;
  out.reserve(texts.size());
  const std::size_t dim = vectors.front()->size();
  for (auto& v : vectors) {
    if (v->size() != dim || dim == 0) {
      throw Error(ErrorCode::DimensionMismatch, "provider returned inconsistent embedding dimensions");
    }
    out.push_back(Embedding{std::move(*v), b.model_id});
  }
  return out;
}

}  // namespace paperchat
