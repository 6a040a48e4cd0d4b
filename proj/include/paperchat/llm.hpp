#pragma once

#include <chrono>
#include <condition_variable>
#include <cstddef>
#include <filesystem>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "paperchat/prompt.hpp"

namespace paperchat {

/// Chat model classes. Base and Extended have fixed windows; Advanced and
/// ExaminerLarge take the window their binding declares; Mock is unbounded.
enum class ChatModelClass { Base, Extended, Advanced, ExaminerLarge, Mock };

std::string_view to_string(ChatModelClass model);
std::optional<ChatModelClass> parse_chat_model(std::string_view name);

inline constexpr std::size_t kBaseWindow = 4096;
inline constexpr std::size_t kExtendedWindow = 16384;
inline constexpr std::size_t kDefaultAdvancedWindow = 8192;
inline constexpr std::size_t kDefaultExaminerWindow = 100000;
inline constexpr std::size_t kUnboundedWindow = std::numeric_limits<std::size_t>::max();

struct CompletionParams {
  double temperature = 0.7;
  std::size_t max_output_tokens = 512;
};

inline constexpr double kQaTemperature = 0.7;
inline constexpr double kJudgeTemperature = 0.0;

struct CompletionResult {
  std::string text;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  std::string model_id;
};

struct ChatRequest {
  std::string model_id;
  std::string prompt;
  std::size_t estimated_tokens = 0;
  CompletionParams params;
};

/// Digest identifying a request for transcripts and replay.
std::string request_digest(const ChatRequest& request);

/// Provider wire contract: model id + message + sampling params in,
/// text + usage out. Transient failures throw Error{ProviderError, retriable}.
class ChatBackend {
 public:
  virtual ~ChatBackend() = default;
  virtual CompletionResult complete(const ChatRequest& request) = 0;
  virtual std::string name() const = 0;
};

/// Deterministic backend. Without a responder the reply is
/// "MOCK:" + first 16 hex of SHA-256(prompt). Usage reports
/// prompt_tokens = the prompt estimate and completion_tokens = token count
/// of the reply.
class MockChatBackend final : public ChatBackend {
 public:
  using Responder = std::function<std::string(const ChatRequest&)>;

  MockChatBackend() = default;
  explicit MockChatBackend(Responder responder) : responder_(std::move(responder)) {}

  CompletionResult complete(const ChatRequest& request) override;
  std::string name() const override { return "mock"; }

  /// The next `count` calls throw a retriable ProviderError.
  void fail_next(std::size_t count);
  std::size_t calls() const;

 private:
  Responder responder_;
  mutable std::mutex mutex_;
  std::size_t pending_failures_ = 0;
  std::size_t calls_ = 0;
};

/// Mock reply for `prompt` with no responder installed.
std::string mock_reply(std::string_view prompt);

/// Offline backend that answers from the evidence it was given: the reply
/// is the evidence sentence sharing most content words with the query,
/// followed by its label, cut to max_output_tokens. Gives retrieval
/// ablations a signal without a live model.
std::string extractive_reply(const ChatRequest& request);

/// Replays a recorded transcript (JSON lines written by
/// LlmGateway::write_transcript), matching requests by digest.
class ReplayChatBackend final : public ChatBackend {
 public:
  explicit ReplayChatBackend(const std::filesystem::path& transcript);
  CompletionResult complete(const ChatRequest& request) override;
  std::string name() const override { return "replay"; }

 private:
  std::map<std::string, CompletionResult> responses_;
};

/// OpenAI-compatible `/v1/chat/completions` client.
class OpenAIChatBackend final : public ChatBackend {
 public:
  OpenAIChatBackend(std::string api_key, std::string base_url = "https://api.openai.com");
  CompletionResult complete(const ChatRequest& request) override;
  std::string name() const override { return "openai"; }

 private:
  std::string api_key_;
  std::string base_url_;
};

struct ChatBinding {
  std::shared_ptr<ChatBackend> backend;
  std::string model_id;
  /// Required for Advanced/ExaminerLarge when the default is wrong; ignored
  /// for Base/Extended/Mock.
  std::optional<std::size_t> window_tokens;
  std::size_t max_concurrent = 4;
};

struct RetryPolicy {
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{200};
};

struct ContextFit {
  bool fits = false;
  long long headroom = 0;
};

struct LedgerEntry {
  std::size_t sequence = 0;
  ChatModelClass model = ChatModelClass::Mock;
  std::string model_id;
  std::string tag;
  std::string request_digest;
  std::size_t estimated_tokens = 0;
  std::size_t window_tokens = 0;
  std::size_t max_output_tokens = 0;
  std::size_t prompt_tokens = 0;
  std::size_t completion_tokens = 0;
  std::string response;
};

/// Uniform chat access: a registry of ChatModelClass -> backend binding,
/// context-window enforcement, retries and a token ledger. Shareable
/// across threads.
class LlmGateway {
 public:
  LlmGateway() = default;
  LlmGateway(const LlmGateway&) = delete;
  LlmGateway& operator=(const LlmGateway&) = delete;

  void bind(ChatModelClass model, ChatBinding binding);
  bool is_bound(ChatModelClass model) const;
  void set_retry_policy(RetryPolicy policy) { retry_ = policy; }

  std::size_t window_tokens(ChatModelClass model) const;
  ContextFit enforce_context_window(ChatModelClass model, const PromptBundle& prompt) const;

  /// Throws ContextOverflow (before any backend call) when
  /// estimated_tokens + max_output_tokens exceeds the window; ProviderError
  /// once retries are exhausted; AuthError without retry.
  CompletionResult complete(ChatModelClass model, const PromptBundle& prompt,
                            const CompletionParams& params, std::string_view tag = {});

  std::vector<LedgerEntry> ledger() const;
  std::size_t total_tokens() const;
  void write_transcript(const std::filesystem::path& path) const;

 private:
  struct Slot {
    ChatBinding binding;
    std::mutex mutex;
    std::condition_variable cv;
    std::size_t in_flight = 0;
  };
  Slot& slot(ChatModelClass model) const;

  std::map<ChatModelClass, std::unique_ptr<Slot>> slots_;
  RetryPolicy retry_;
  mutable std::mutex ledger_mutex_;
  std::vector<LedgerEntry> ledger_;
};

}  // namespace paperchat
