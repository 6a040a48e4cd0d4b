#include <random>

#include "doctest.h"
#include "oracle.hpp"
#include "paperchat/chunking.hpp"
#include "paperchat/errors.hpp"

using namespace paperchat;

TEST_CASE("tokenize") {
  CHECK(tokenize("").empty());
  CHECK(tokenize("a b c") == std::vector<std::string>{"a", "b", "c"});
  CHECK(tokenize("Less Is More for Alignment.") ==
        std::vector<std::string>{"Less", "Is", "More", "for", "Alignment", "."});
  CHECK(tokenize("x,y") == std::vector<std::string>{"x", ",", "y"});
  CHECK(count_tokens("  \n\t ") == 0);
}

TEST_CASE("tokenizer agrees with the oracle on random text") {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto text = oracle::random_text(rng, 1 + i);
    CHECK(tokenize(text) == oracle::tokens(text));
  }
}

TEST_CASE("truncate and tail") {
  CHECK(truncate_tokens("a b  c d", 2) == "a b");
  CHECK(tail_tokens("a b c d", 2) == "c d");
  CHECK(truncate_tokens("a b", 5) == "a b");
}

TEST_CASE("segment basics") {
  CorpusView empty;
  CHECK(segment(empty, {}).empty());
  CHECK(ChunkingConfig{}.segment_size == 150);

  CorpusView seven{"p", {{0, "a b c d e f g"}}};
  const auto chunks = segment(seven, {3});
  REQUIRE(chunks.size() == 3);
  CHECK(chunks[0].token_count == 3);
  CHECK(chunks[1].token_count == 3);
  CHECK(chunks[2].token_count == 1);
  CHECK(chunks[0].text == "a b c");
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    CHECK(chunks[i].chunk_id == i);
    CHECK(chunks[i].page_label == i);
  }
  CHECK_THROWS_AS(segment(seven, {0}), Error);
}

TEST_CASE("chunk counts are ceil per passage and chunks are bounded") {
  std::mt19937_64 rng(5);
  for (std::size_t S : {150u, 300u, 512u}) {
    for (int trial = 0; trial < 20; ++trial) {
      CorpusView corpus;
      std::size_t expected = 0;
      const int passages = 1 + trial % 4;
      for (int p = 0; p < passages; ++p) {
        const std::size_t T = std::uniform_int_distribution<std::size_t>(1, 1500)(rng);
        corpus.passages.push_back({static_cast<std::size_t>(p), oracle::random_text(rng, T)});
        expected += (oracle::tokens(corpus.passages.back().text).size() + S - 1) / S;
      }
      const auto chunks = segment(corpus, {S});
      CHECK(chunks.size() == expected);
      std::vector<std::string> all_chunk_tokens, all_source_tokens;
      for (const auto& c : chunks) {
        CHECK(c.token_count >= 1);
        CHECK(c.token_count <= S);
        CHECK(oracle::tokens(c.text).size() == c.token_count);
        for (auto& t : oracle::tokens(c.text)) all_chunk_tokens.push_back(t);
      }
      for (const auto& p : corpus.passages) {
        for (auto& t : oracle::tokens(p.text)) all_source_tokens.push_back(t);
      }
      CHECK(all_chunk_tokens == all_source_tokens);
    }
  }
}
