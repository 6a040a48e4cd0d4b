// Serial reference kernel vs OpenMP kernel on random corpora.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "paperchat/retrieval.hpp"

using namespace paperchat;

namespace {

std::vector<ChunkEmbedding> corpus(std::size_t n, std::size_t dim) {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<ChunkEmbedding> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    out[i].chunk_id = i;
    out[i].embedding.vector.resize(dim);
    for (auto& x : out[i].embedding.vector) x = u(rng);
  }
  return out;
}

using Kernel = void (*)(std::span<const ChunkEmbedding>, std::span<const double>, RetrievalStrategy,
                        std::span<double>);

void score(benchmark::State& state, Kernel kernel, RetrievalStrategy strategy) {
  const auto chunks = corpus(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  const auto query = chunks.front().embedding.vector;
  std::vector<double> out(chunks.size());
  for (auto _ : state) {
    kernel(chunks, query, strategy, out);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void args(benchmark::internal::Benchmark* b) {
  for (long n : {500, 5000, 50000}) {
    for (long dim : {256, 1536}) b->Args({n, dim});
  }
}

}  // namespace

BENCHMARK_CAPTURE(score, cosine_serial, kernels::score_serial, RetrievalStrategy::Cosine)->Apply(args);
BENCHMARK_CAPTURE(score, cosine_parallel, kernels::score_parallel, RetrievalStrategy::Cosine)->Apply(args);
BENCHMARK_CAPTURE(score, knn_serial, kernels::score_serial, RetrievalStrategy::Knn)->Apply(args);
BENCHMARK_CAPTURE(score, knn_parallel, kernels::score_parallel, RetrievalStrategy::Knn)->Apply(args);

BENCHMARK_MAIN();
