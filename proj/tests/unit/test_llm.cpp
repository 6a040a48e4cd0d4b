#include <filesystem>

#include "doctest.h"
#include "oracle.hpp"
#include "paperchat/digest.hpp"
#include "paperchat/errors.hpp"
#include "paperchat/llm.hpp"

using namespace paperchat;

namespace {
class AuthFailing final : public ChatBackend {
 public:
  CompletionResult complete(const ChatRequest&) override {
    ++calls;
    throw Error(ErrorCode::AuthError, "bad key");
  }
  std::string name() const override { return "auth"; }
  int calls = 0;
};

PromptBundle sized(std::size_t tokens) {
  std::string text;
  for (std::size_t i = 0; i < tokens; ++i) text += "w ";
  return make_prompt(text);
}
}  // namespace

TEST_CASE("mock replies are digests of the prompt") {
  testkit::MockStack stack;
  const auto p = make_prompt("P");
  const auto r = stack.gateway->complete(ChatModelClass::Mock, p, {});
  CHECK(r.text == "MOCK:" + sha256_hex("P").substr(0, 16));
  CHECK(r.text == mock_reply("P"));
  CHECK(r.prompt_tokens == p.estimated_tokens);
  CHECK(r.prompt_tokens == oracle::tokens("P").size());
  CHECK(r.completion_tokens == oracle::tokens(r.text).size());
  CHECK(stack.gateway->complete(ChatModelClass::Mock, p, {}).text == r.text);
}

TEST_CASE("context windows") {
  testkit::MockStack stack;
  auto& g = *stack.gateway;
  CHECK(g.window_tokens(ChatModelClass::Base) == 4096);
  CHECK(g.window_tokens(ChatModelClass::Extended) == 16384);
  CHECK(g.window_tokens(ChatModelClass::Advanced) == kDefaultAdvancedWindow);
  CHECK(g.window_tokens(ChatModelClass::ExaminerLarge) == kDefaultExaminerWindow);
  CHECK(g.window_tokens(ChatModelClass::Mock) == kUnboundedWindow);

  auto fit = g.enforce_context_window(ChatModelClass::Base, sized(4096));
  CHECK(fit.fits);
  CHECK(fit.headroom == 0);
  fit = g.enforce_context_window(ChatModelClass::Base, sized(4097));
  CHECK_FALSE(fit.fits);
  CHECK(fit.headroom == -1);
  CHECK(g.enforce_context_window(ChatModelClass::Extended, sized(12000)).headroom == 4384);

  try {
    g.complete(ChatModelClass::Base, sized(5000), {});
    FAIL("expected ContextOverflow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ContextOverflow);
  }
  CHECK(stack.backend->calls() == 0);
  CHECK_THROWS_AS(g.complete(ChatModelClass::Base, sized(4000), {0.0, 200}), Error);
  CHECK(stack.backend->calls() == 0);
  CHECK_NOTHROW(g.complete(ChatModelClass::Base, sized(4000), {0.0, 96}));

  LlmGateway custom;
  custom.bind(ChatModelClass::Advanced, {stack.backend, "adv", 32000, 1});
  CHECK(custom.window_tokens(ChatModelClass::Advanced) == 32000);
}

TEST_CASE("retries transient failures, not auth failures") {
  testkit::MockStack stack;
  stack.backend->fail_next(2);
  CHECK_NOTHROW(stack.gateway->complete(ChatModelClass::Base, make_prompt("x"), {}));
  CHECK(stack.backend->calls() == 3);

  stack.backend->fail_next(3);
  try {
    stack.gateway->complete(ChatModelClass::Base, make_prompt("x"), {});
    FAIL("expected ProviderError");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::ProviderError);
  }

  auto auth = std::make_shared<AuthFailing>();
  LlmGateway g;
  g.set_retry_policy({3, std::chrono::milliseconds(0)});
  g.bind(ChatModelClass::Base, {auth, "b", std::nullopt, 1});
  CHECK_THROWS_AS(g.complete(ChatModelClass::Base, make_prompt("x"), {}), Error);
  CHECK(auth->calls == 1);
  CHECK_THROWS_AS(g.complete(ChatModelClass::Extended, make_prompt("x"), {}), Error);
}

TEST_CASE("ledger sums and transcript replay") {
  testkit::MockStack stack;
  auto& g = *stack.gateway;
  std::size_t sum = 0;
  for (int i = 0; i < 5; ++i) {
    const auto r = g.complete(ChatModelClass::Base, make_prompt("prompt " + std::to_string(i)), {}, "t");
    sum += r.prompt_tokens + r.completion_tokens;
  }
  CHECK(g.total_tokens() == sum);
  const auto ledger = g.ledger();
  REQUIRE(ledger.size() == 5);
  for (const auto& e : ledger) CHECK(e.estimated_tokens <= e.window_tokens);

  const auto dir = testkit::temp_dir("transcript");
  const auto path = std::filesystem::path(dir) / "t.jsonl";
  g.write_transcript(path);

  LlmGateway replay;
  replay.bind(ChatModelClass::Base, {std::make_shared<ReplayChatBackend>(path), "mock-base", std::nullopt, 1});
  for (int i = 0; i < 5; ++i) {
    const auto p = make_prompt("prompt " + std::to_string(i));
    CHECK(replay.complete(ChatModelClass::Base, p, {}).text == ledger[i].response);
  }
  CHECK_THROWS_AS(replay.complete(ChatModelClass::Base, make_prompt("unseen"), {}), Error);

  LlmGateway again;
  again.bind(ChatModelClass::Base, {std::make_shared<MockChatBackend>(), "mock-base", std::nullopt, 1});
  for (int i = 0; i < 5; ++i) again.complete(ChatModelClass::Base, make_prompt("prompt " + std::to_string(i)), {}, "t");
  const auto path2 = std::filesystem::path(dir) / "t2.jsonl";
  again.write_transcript(path2);
  CHECK(testkit::read_text(path.string()) == testkit::read_text(path2.string()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("extractive backend answers from the evidence") {
  const std::vector<EvidenceItem> ev{{3, "The sky is blue. Alignment needs few examples."},
                                     {5, "Pretraining provides knowledge."}};
  ChatRequest req{"x", build_qa_prompt(ev, "how many examples does alignment need").rendered_text, 0, {0.0, 50}};
  const auto reply = extractive_reply(req);
  CHECK(reply == "Alignment needs few examples. [3]");
  req.params.max_output_tokens = 2;
  CHECK(extractive_reply(req) == "Alignment needs");
}

TEST_CASE("model class names") {
  for (auto m : {ChatModelClass::Base, ChatModelClass::Extended, ChatModelClass::Advanced,
                 ChatModelClass::ExaminerLarge, ChatModelClass::Mock}) {
    CHECK(parse_chat_model(to_string(m)) == m);
  }
  CHECK(kQaTemperature == 0.7);
  CHECK(kJudgeTemperature == 0.0);
}
