#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paperchat/embedding.hpp"

namespace paperchat {

enum class RetrievalStrategy { Cosine, Knn };

std::string_view to_string(RetrievalStrategy strategy);
std::optional<RetrievalStrategy> parse_strategy(std::string_view name);

struct RetrievalConfig {
  RetrievalStrategy strategy = RetrievalStrategy::Knn;
  std::size_t top_k = 5;
  /// Chunk size the corpus was segmented with; carried for provenance.
  std::size_t segment_size = 300;

  bool operator==(const RetrievalConfig&) const = default;
};

/// `score` is the cosine similarity under Cosine and the negated Euclidean
/// distance under KNN, so higher is always better.
struct RetrievalHit {
  std::size_t chunk_id = 0;
  double score = 0.0;
  std::size_t rank = 0;

  bool operator==(const RetrievalHit&) const = default;
};

struct ChunkEmbedding {
  std::size_t chunk_id = 0;
  Embedding embedding;
};

double cosine_similarity(std::span<const double> d, std::span<const double> q);
double cosine_similarity(const Embedding& d, const Embedding& q);

double euclidean_distance(std::span<const double> a, std::span<const double> b);
double euclidean_distance(const Embedding& a, const Embedding& b);

/// Top-k chunks for `query`, ties broken by ascending chunk_id. Scoring runs
/// on the OpenMP kernel. Zero-norm chunks are skipped under Cosine; a
/// zero-norm query under Cosine throws ZeroNormVector.
std::vector<RetrievalHit> retrieve(std::span<const ChunkEmbedding> chunks, const Embedding& query,
                                   const RetrievalConfig& cfg);

/// Identical contract, scored on the serial reference kernel.
std::vector<RetrievalHit> retrieve_serial(std::span<const ChunkEmbedding> chunks,
                                          const Embedding& query, const RetrievalConfig& cfg);

namespace kernels {

/// Per-chunk score for `strategy`. Entries for zero-norm chunks under
/// Cosine are NaN. The parallel kernel computes each entry with the same
/// arithmetic as the serial one, so results are bit-identical.
void score_serial(std::span<const ChunkEmbedding> chunks, std::span<const double> query,
                  RetrievalStrategy strategy, std::span<double> out);
void score_parallel(std::span<const ChunkEmbedding> chunks, std::span<const double> query,
                    RetrievalStrategy strategy, std::span<double> out);

}  // namespace kernels

}  // namespace paperchat
