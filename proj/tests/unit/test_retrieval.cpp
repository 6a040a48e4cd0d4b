#include <cstring>
#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "paperchat/errors.hpp"
#include "paperchat/retrieval.hpp"

using namespace paperchat;

namespace {
Embedding E(std::vector<double> v) { return {std::move(v), "t"}; }

std::vector<std::size_t> ids(const std::vector<RetrievalHit>& hits) {
  std::vector<std::size_t> out;
  for (const auto& h : hits) out.push_back(h.chunk_id);
  return out;
}
}  // namespace

TEST_CASE("cosine and euclidean formulas") {
  CHECK(cosine_similarity(E({1, 2, 2}), E({2, 1, 2})) == doctest::Approx(8.0 / 9.0).epsilon(1e-12));
  CHECK(cosine_similarity(E({1, 0}), E({0, 1})) == 0.0);
  CHECK(cosine_similarity(E({3, 4}), E({3, 4})) == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(euclidean_distance(E({0, 0}), E({3, 4})) == 5.0);
  CHECK(euclidean_distance(E({1, 2}), E({4, 6})) == 5.0);
  CHECK(euclidean_distance(E({1, 2}), E({1, 2})) == 0.0);
  CHECK_THROWS_AS(cosine_similarity(E({1, 2}), E({1, 2, 3})), Error);
  CHECK_THROWS_AS(euclidean_distance(E({1}), E({1, 2})), Error);
  CHECK_THROWS_AS(cosine_similarity(E({0, 0}), E({1, 2})), Error);
}

TEST_CASE("retrieve examples") {
  std::vector<ChunkEmbedding> one{{0, E({1, 1})}};
  for (auto s : {RetrievalStrategy::Cosine, RetrievalStrategy::Knn}) {
    const auto hits = retrieve(one, E({1, 0}), {s, 3, 150});
    REQUIRE(hits.size() == 1);
    CHECK(hits[0].rank == 1);
  }

  std::vector<ChunkEmbedding> three{{0, E({0, 0})}, {1, E({1, 0})}, {2, E({5, 5})}};
  CHECK(ids(retrieve(three, E({0.9, 0}), {RetrievalStrategy::Knn, 2, 150})) == std::vector<std::size_t>{1, 0});

  std::vector<ChunkEmbedding> twins{{4, E({1, 2})}, {2, E({1, 2})}};
  CHECK(ids(retrieve(twins, E({1, 1}), {RetrievalStrategy::Cosine, 1, 150})) == std::vector<std::size_t>{2});
  CHECK(ids(retrieve(twins, E({1, 1}), {RetrievalStrategy::Knn, 1, 150})) == std::vector<std::size_t>{2});

  // Zero-norm chunk skipped under cosine, zero query rejected.
  CHECK(ids(retrieve(three, E({1, 0}), {RetrievalStrategy::Cosine, 5, 150})) == std::vector<std::size_t>{1, 2});
  CHECK_THROWS_AS(retrieve(three, E({0, 0}), {RetrievalStrategy::Cosine, 1, 150}), Error);
  CHECK_THROWS_AS(retrieve(three, E({1, 0, 0}), {RetrievalStrategy::Knn, 1, 150}), Error);
}

TEST_CASE("hits are ranked densely with non-increasing scores") {
  std::mt19937_64 rng(1);
  const auto corpus = oracle::random_corpus(rng, 100, 16);
  const auto hits = retrieve(corpus, E(oracle::random_vector(rng, 16)), {RetrievalStrategy::Knn, 10, 150});
  REQUIRE(hits.size() == 10);
  for (std::size_t i = 0; i < hits.size(); ++i) {
    CHECK(hits[i].rank == i + 1);
    if (i > 0) CHECK(hits[i].score <= hits[i - 1].score);
  }
}

TEST_CASE("parallel and serial kernels agree bit for bit") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const auto corpus = oracle::random_corpus(rng, 300, 32);
    const auto q = oracle::random_vector(rng, 32);
    for (auto s : {RetrievalStrategy::Cosine, RetrievalStrategy::Knn}) {
      std::vector<double> a(corpus.size()), b(corpus.size());
      kernels::score_serial(corpus, q, s, a);
      kernels::score_parallel(corpus, q, s, b);
      CHECK(std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0);
      CHECK(retrieve(corpus, E(q), {s, 7, 150}) == retrieve_serial(corpus, E(q), {s, 7, 150}));
    }
  }
}

TEST_CASE("ranking invariances") {
  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 20; ++trial) {
    auto corpus = oracle::random_corpus(rng, 80, 12);
    const auto q = oracle::random_vector(rng, 12);
    const auto base_cos = ids(retrieve(corpus, E(q), {RetrievalStrategy::Cosine, 8, 150}));
    const auto base_knn = ids(retrieve(corpus, E(q), {RetrievalStrategy::Knn, 8, 150}));

    auto scaled = corpus;
    for (auto& c : scaled) for (auto& x : c.embedding.vector) x *= 4.0;
    CHECK(ids(retrieve(scaled, E(q), {RetrievalStrategy::Cosine, 8, 150})) == base_cos);

    auto shifted = corpus;
    auto q2 = q;
    for (std::size_t i = 0; i < q2.size(); ++i) q2[i] += static_cast<double>(i % 3);
    for (auto& c : shifted) {
      for (std::size_t i = 0; i < c.embedding.vector.size(); ++i) c.embedding.vector[i] += static_cast<double>(i % 3);
    }
    CHECK(ids(retrieve(shifted, E(q2), {RetrievalStrategy::Knn, 8, 150})) == base_knn);
  }
}

TEST_CASE("retrieve matches the brute-force oracle") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const std::size_t n = std::uniform_int_distribution<std::size_t>(1, 500)(rng);
    const std::size_t dim = std::uniform_int_distribution<std::size_t>(8, 64)(rng);
    const auto corpus = oracle::random_corpus(rng, n, dim);
    const auto q = oracle::random_vector(rng, dim);
    const std::size_t k = std::uniform_int_distribution<std::size_t>(1, 12)(rng);
    for (auto s : {RetrievalStrategy::Cosine, RetrievalStrategy::Knn}) {
      CHECK(ids(retrieve(corpus, E(q), {s, k, 150})) == oracle::brute_force_ranking(corpus, q, s, k));
    }
  }
}

TEST_CASE("strategy names") {
  CHECK(parse_strategy("KNN") == RetrievalStrategy::Knn);
  CHECK(parse_strategy("cosine") == RetrievalStrategy::Cosine);
  CHECK_FALSE(parse_strategy("dot"));
  const RetrievalConfig def;
  CHECK(def.strategy == RetrievalStrategy::Knn);
  CHECK(def.segment_size == 300);
  CHECK(def.top_k == 5);
}
