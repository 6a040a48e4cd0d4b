#include "paperchat/retrieval.hpp"

#include <spdlog/spdlog.h>

#include <algorithm>
#include <cctype>
#include <cmath>

#include "paperchat/errors.hpp"

namespace paperchat {

std::string_view to_string(RetrievalStrategy strategy) {
  return strategy == RetrievalStrategy::Cosine ? "cosine" : "knn";
}

std::optional<RetrievalStrategy> parse_strategy(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "cosine") return RetrievalStrategy::Cosine;
  if (lower == "knn") return RetrievalStrategy::Knn;
  return std::nullopt;
}

namespace {

void require_same_dimension(std::size_t a, std::size_t b) {
  if (a != b) {
    throw Error(ErrorCode::DimensionMismatch,
                "embedding dimensions differ: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

using Kernel = void (*)(std::span<const ChunkEmbedding>, std::span<const double>, RetrievalStrategy,
                        std::span<double>);

std::vector<RetrievalHit> retrieve_with(Kernel kernel, std::span<const ChunkEmbedding> chunks,
                                        const Embedding& query, const RetrievalConfig& cfg) {
  if (chunks.empty()) throw Error(ErrorCode::PreconditionViolation, "retrieve needs at least one chunk");
  if (cfg.top_k == 0) throw Error(ErrorCode::InvalidArgument, "top_k must be >= 1");
  for (const auto& c : chunks) require_same_dimension(c.embedding.dimension(), query.dimension());
  if (cfg.strategy == RetrievalStrategy::Cosine &&
      std::all_of(query.vector.begin(), query.vector.end(), [](double x) { return x == 0.0; })) {
    throw Error(ErrorCode::ZeroNormVector, "query embedding has zero norm");
  }

  std::vector<double> scores(chunks.size());
  kernel(chunks, query.vector, cfg.strategy, scores);

  std::vector<RetrievalHit> candidates;
  candidates.reserve(chunks.size());
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    if (std::isnan(scores[i])) {
      ++skipped;
      continue;
    }
    candidates.push_back(RetrievalHit{chunks[i].chunk_id, scores[i], 0});
  }
  if (skipped > 0) spdlog::warn("retrieve: skipped {} zero-norm chunk embedding(s)", skipped);

  const std::size_t k = std::min(cfg.top_k, candidates.size());
  auto better = [](const RetrievalHit& a, const RetrievalHit& b) {
    if (a.score != b.score) return a.score > b.score;
    return a.chunk_id < b.chunk_id;
  };
  std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(k), candidates.end(),
                    better);
  candidates.resize(k);
  for (std::size_t i = 0; i < k; ++i) candidates[i].rank = i + 1;
  return candidates;
}

}  // namespace

double cosine_similarity(std::span<const double> d, std::span<const double> q) {
  require_same_dimension(d.size(), q.size());
  double dot = 0.0, dd = 0.0, qq = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    dot += d[i] * q[i];
    dd += d[i] * d[i];
    qq += q[i] * q[i];
  }
  if (dd == 0.0 || qq == 0.0) throw Error(ErrorCode::ZeroNormVector, "cosine similarity of a zero-norm vector");
  return dot / (std::sqrt(dd) * std::sqrt(qq));
}

double cosine_similarity(const Embedding& d, const Embedding& q) { return cosine_similarity(d.vector, q.vector); }

double euclidean_distance(std::span<const double> a, std::span<const double> b) {
  require_same_dimension(a.size(), b.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double diff = a[i] - b[i];
    sum += diff * diff;
  }
  return std::sqrt(sum);
}

double euclidean_distance(const Embedding& a, const Embedding& b) { return euclidean_distance(a.vector, b.vector); }

std::vector<RetrievalHit> retrieve(std::span<const ChunkEmbedding> chunks, const Embedding& query,
                                   const RetrievalConfig& cfg) {
  return retrieve_with(&kernels::score_parallel, chunks, query, cfg);
}

std::vector<RetrievalHit> retrieve_serial(std::span<const ChunkEmbedding> chunks, const Embedding& query,
                                          const RetrievalConfig& cfg) {
  return retrieve_with(&kernels::score_serial, chunks, query, cfg);
}

}  // namespace paperchat
