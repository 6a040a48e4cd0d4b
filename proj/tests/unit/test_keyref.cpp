#include "doctest.h"
#include "oracle.hpp"
#include "paperchat/errors.hpp"
#include "paperchat/keyref.hpp"

using namespace paperchat;

TEST_CASE("title normalization") {
  CHECK(normalize_title("  Scaling Instruction-Finetuned   Language Models. ") ==
        "scaling instruction finetuned language models");
  std::mt19937_64 rng(4);
  for (int i = 0; i < 200; ++i) {
    const auto t = oracle::random_text(rng, 1 + i % 20);
    const auto n = normalize_title(t);
    CHECK(normalize_title(n) == n);
  }
  CHECK(normalize_title("!!!").empty());
}

TEST_CASE("title matching") {
  const std::vector<Reference> refs{{"Scaling language modeling with pathways", "2022", "", "A"},
                                    {"Attention is all you need", "2017", "", "B"},
                                    {"...", "2000", "", "C"},
                                    {"Language models", "2020", "", "D"}};
  auto m = match_titles("Key Reference: [SCALING language-modeling with Pathways, A, 2022]", refs);
  REQUIRE(m.size() == 1);
  CHECK(m[0].reference_index == 0);
  CHECK(m[0].confidence == MatchConfidence::Exact);
  CHECK(m[0].rationale.find("Key Reference") != std::string::npos);

  m = match_titles("Key Reference: [Attention is what you need, B, 2017]", refs);
  REQUIRE(m.size() == 1);
  CHECK(m[0].reference_index == 1);
  CHECK(m[0].confidence == MatchConfidence::Fuzzy);

  // A short title only matches on word boundaries.
  CHECK(match_titles("large languagemodels", refs).empty());
  CHECK(match_titles("nothing relevant here", refs).empty());
  CHECK(match_titles("", refs).empty());
}

TEST_CASE("key references bind the model's echo to the reference list") {
  const auto paper = testkit::lima();
  const auto& target = paper.references.at(2);
  testkit::MockStack stack;
  auto echo = std::make_shared<MockChatBackend>([&](const ChatRequest&) {
    return "Key Reference: [" + target.title + ", " + target.author + ", " + target.year +
           "]\nWhy this reference is important to the document: it is central.";
  });
  stack.gateway->bind(ChatModelClass::Base, {echo, "echo", std::nullopt, 1});

  auto orch = stack.orchestrator();
  const DocumentIndex doc(paper, document_id(paper));
  ConversationMemory memory("c", doc.document_id());
  orch.answer("what is the main finding ?", memory, &doc);
  const std::string summary = memory.entries().back().summaries.back().text;

  const auto before = stack.gateway->ledger().size();
  const auto r = find_key_references(memory, paper, *stack.gateway);
  REQUIRE(r.matched.size() == 1);
  CHECK(r.matched[0].reference == target);
  CHECK(r.matched[0].reference_index == 2);
  CHECK(r.matched[0].confidence == MatchConfidence::Exact);
  const auto ledger = stack.gateway->ledger();
  REQUIRE(ledger.size() == before + 1);
  CHECK(ledger.back().tag == "keyref");
  CHECK(r.token_cost == ledger.back().prompt_tokens + ledger.back().completion_tokens);

  const auto& text = r.prompt.rendered_text;
  const auto s = text.find(summary), a = text.find(paper.abstract);
  REQUIRE(s != std::string::npos);
  REQUIRE(a != std::string::npos);
  CHECK(s < a);
  for (const auto& ref : paper.references) {
    const auto t = text.find(ref.title, a + paper.abstract.size());
    CHECK(t != std::string::npos);
  }
}

TEST_CASE("key references without cached summaries or references") {
  auto paper = testkit::lima();
  testkit::MockStack stack;
  ConversationMemory empty("c", "d");
  const auto r = find_key_references(empty, paper, *stack.gateway);
  CHECK(r.prompt.rendered_text.starts_with("Abstract:"));
  CHECK(r.matched.empty());

  paper.references.clear();
  try {
    find_key_references(empty, paper, *stack.gateway);
    FAIL("expected NoReferences");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NoReferences);
  }
}

TEST_CASE("cached summaries are trimmed from the oldest end") {
  const auto paper = testkit::lima();
  testkit::MockStack stack;
  ConversationMemory memory("c", "d");
  std::mt19937_64 rng(12);
  for (int i = 0; i < 20; ++i) {
    MemoryEntry e;
    e.query = "q";
    SummaryRecord s;
    s.text = "ENTRY" + std::to_string(i) + " " + oracle::random_text(rng, 400);
    e.summaries.push_back(s);
    memory.append(e);
  }
  const auto r = find_key_references(memory, paper, *stack.gateway);
  CHECK(r.prompt.estimated_tokens + 512 <= 4096);
  CHECK(r.prompt.rendered_text.find("ENTRY19") != std::string::npos);
  CHECK(r.prompt.rendered_text.find("ENTRY0 ") == std::string::npos);
}
