#include <cmath>
#include <limits>

#include "paperchat/retrieval.hpp"

namespace paperchat::kernels {

namespace {

double norm_of(std::span<const double> v) {
  double sum = 0.0;
  for (double x : v) sum += x * x;
  return std::sqrt(sum);
}

// Score of one chunk; shared by both kernels so they agree bit for bit.
inline double score_one(std::span<const double> d, std::span<const double> q, double query_norm,
                        RetrievalStrategy strategy) {
  if (strategy == RetrievalStrategy::Cosine) {
    const double dn = norm_of(d);
    if (dn == 0.0) return std::numeric_limits<double>::quiet_NaN();
    double dot = 0.0;
    for (std::size_t i = 0; i < d.size(); ++i) dot += d[i] * q[i];
    return dot / (dn * query_norm);
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double diff = d[i] - q[i];
    sum += diff * diff;
  }
  return -std::sqrt(sum);
}

}  // namespace

void score_serial(std::span<const ChunkEmbedding> chunks, std::span<const double> query,
                  RetrievalStrategy strategy, std::span<double> out) {
  const double qn = norm_of(query);
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    out[i] = score_one(chunks[i].embedding.vector, query, qn, strategy);
  }
}

void score_parallel(std::span<const ChunkEmbedding> chunks, std::span<const double> query,
                    RetrievalStrategy strategy, std::span<double> out) {
  const double qn = norm_of(query);
  const auto n = static_cast<std::ptrdiff_t>(chunks.size());
#pragma omp parallel for schedule(static)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    out[i] = score_one(chunks[i].embedding.vector, query, qn, strategy);
  }
}

}  // namespace paperchat::kernels
