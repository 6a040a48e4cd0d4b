#include <regex>

#include "doctest.h"
#include "oracle.hpp"
#include "paperchat/errors.hpp"
#include "paperchat/summarization.hpp"

using namespace paperchat;

namespace {
std::vector<Chunk> make_chunks(std::mt19937_64& rng, std::size_t n, std::size_t tokens) {
  std::vector<Chunk> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(Chunk{i, i, oracle::random_text(rng, tokens), tokens});
  return out;
}

// First "[n]" label in the prompt's docs block.
std::string label_of(const ChatRequest& r) {
  static const std::regex label(R"(\[(\d+)\])");
  std::smatch m;
  return std::regex_search(r.prompt, m, label) ? m[1].str() : "?";
}

class Failing final : public LocalSummarizer {
 public:
  std::string summarize(std::string_view, std::size_t) override {
    throw Error(ErrorCode::SummarizerUnavailable, "down");
  }
};
}  // namespace

TEST_CASE("mode names round-trip") {
  for (auto m : {SummarizationMode::LocalAbstractive, SummarizationMode::LlmSummarizeRefine,
                 SummarizationMode::MultiPageRefine}) {
    CHECK(parse_summarization_mode(to_string(m)) == m);
  }
  CHECK_FALSE(parse_summarization_mode("bogus"));
}

TEST_CASE("local summaries respect the ratio budget") {
  std::mt19937_64 rng(11);
  auto chunks = make_chunks(rng, 5, 150);
  SentenceRankSummarizer s;
  const auto records = summarize_local(chunks, &s);
  REQUIRE(records.size() == 5);
  for (std::size_t i = 0; i < records.size(); ++i) {
    CHECK(records[i].mode == SummarizationMode::LocalAbstractive);
    CHECK(records[i].source_chunk_ids == std::vector<std::size_t>{chunks[i].chunk_id});
    CHECK(records[i].token_cost == 0);
    CHECK_FALSE(records[i].degraded);
    CHECK(oracle::tokens(records[i].text).size() <= 60);
    CHECK_FALSE(records[i].text.empty());
  }
  CHECK(summarize_local(chunks, &s) == records);
}

TEST_CASE("short chunks pass through; failures degrade") {
  const std::vector<Chunk> short_chunk{{0, 0, "tiny chunk of text .", 5}};
  SentenceRankSummarizer s;
  const auto rec = summarize_local(short_chunk, &s).front();
  CHECK(rec.pass_through);
  CHECK(rec.text == short_chunk[0].text);

  std::mt19937_64 rng(3);
  auto chunks = make_chunks(rng, 2, 100);
  Failing failing;
  for (auto* summarizer : {static_cast<LocalSummarizer*>(&failing), static_cast<LocalSummarizer*>(nullptr)}) {
    const auto records = summarize_local(chunks, summarizer);
    REQUIRE(records.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
      CHECK(records[i].degraded);
      CHECK(oracle::tokens(records[i].text).size() == 40);
      const auto src = oracle::tokens(chunks[i].text);
      const auto got = oracle::tokens(records[i].text);
      CHECK(std::equal(got.begin(), got.end(), src.begin()));
    }
  }
  CHECK_THROWS_AS(summarize_local(std::span<const Chunk>{}, &s), Error);
}

TEST_CASE("refine issues one call per chunk, in order") {
  std::mt19937_64 rng(5);
  const auto chunks = make_chunks(rng, 5, 80);
  for (std::size_t parallel : {1u, 4u}) {
    auto backend = std::make_shared<MockChatBackend>([](const ChatRequest& r) { return "SUMMARY(" + label_of(r) + ")"; });
    LlmGateway g;
    g.bind(ChatModelClass::Base, {backend, "b", std::nullopt, 2});
    const auto out = summarize_refine_llm(chunks, "what", g, {ChatModelClass::Base, 0.7, parallel});
    REQUIRE(out.records.size() == 5);
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(out.records[i].text == "SUMMARY(" + std::to_string(i) + ")");
      CHECK(out.records[i].source_chunk_ids == std::vector<std::size_t>{i});
    }
    CHECK(backend->calls() == 5);
    CHECK(out.token_cost == g.total_tokens());
    for (const auto& e : g.ledger()) {
      CHECK(e.request_digest.size() > 0);
      CHECK(e.max_output_tokens == 80);
    }
  }
}

TEST_CASE("refine drops chunks marked irrelevant") {
  std::mt19937_64 rng(6);
  const auto chunks = make_chunks(rng, 5, 60);
  auto backend = std::make_shared<MockChatBackend>([](const ChatRequest& r) {
    const auto l = label_of(r);
    return (l == "1" || l == "3") ? std::string("IRRELEVANT") : "keep " + l;
  });
  LlmGateway g;
  g.bind(ChatModelClass::Base, {backend, "b", std::nullopt, 1});
  const auto out = summarize_refine_llm(chunks, "q", g);
  REQUIRE(out.records.size() == 3);
  CHECK(out.records[1].source_chunk_ids.front() == 2);
  REQUIRE(out.filter_log.size() == 2);
  CHECK(out.filter_log[0].chunk_id == 1);
  CHECK(out.filter_log[1].chunk_id == 3);
  CHECK(out.token_cost == g.total_tokens());
}

TEST_CASE("refine records provider failures without throwing") {
  std::mt19937_64 rng(8);
  const auto chunks = make_chunks(rng, 2, 30);
  auto backend = std::make_shared<MockChatBackend>();
  LlmGateway g;
  g.set_retry_policy({1, std::chrono::milliseconds(0)});
  g.bind(ChatModelClass::Base, {backend, "b", std::nullopt, 1});
  backend->fail_next(1);
  const auto out = summarize_refine_llm(chunks, "q", g);
  REQUIRE(out.records.size() == 2);
  CHECK(out.records[0].error.has_value());
  CHECK(out.records[0].text.empty());
  CHECK_FALSE(out.records[1].error.has_value());
}

TEST_CASE("multi-page refinement folds groups sequentially") {
  std::mt19937_64 rng(9);
  const auto chunks = make_chunks(rng, 8, 100);
  testkit::MockStack stack;
  MultiPageOptions opt;
  opt.max_group_chunks = 4;
  CHECK(fold_groups(chunks, 16384, opt).size() == 2);
  const auto rec = multipage_refine(chunks, "q", *stack.gateway, opt);
  CHECK(stack.backend->calls() == 2);
  CHECK(rec.source_chunk_ids.size() == 8);
  CHECK(rec.mode == SummarizationMode::MultiPageRefine);
  CHECK(rec.token_cost == stack.gateway->total_tokens());
  const auto ledger = stack.gateway->ledger();
  CHECK(ledger[0].tag == "multipage-seed");
  CHECK(ledger[1].tag == "multipage-fold");
  // The second call sees the first call's synthesis.
  CHECK(rec.text == ledger[1].response);
}

TEST_CASE("multi-page refinement never shortens relevant context") {
  std::mt19937_64 rng(10);
  testkit::MockStack stack;
  const std::vector<Chunk> huge{{0, 0, oracle::random_text(rng, 17000), 17000}};
  try {
    multipage_refine(huge, "q", *stack.gateway);
    FAIL("expected ContextOverflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ContextOverflow);
  }
  CHECK(stack.backend->calls() == 0);

  const auto many = make_chunks(rng, 40, 500);
  const auto rec = multipage_refine(many, "q", *stack.gateway);
  CHECK(rec.source_chunk_ids.size() == 40);
  for (const auto& e : stack.gateway->ledger()) CHECK(e.estimated_tokens + e.max_output_tokens <= 16384);
  std::size_t seen = 0;
  for (const auto& e : stack.gateway->ledger()) seen += e.estimated_tokens;
  CHECK(seen >= 40 * 500);
}
