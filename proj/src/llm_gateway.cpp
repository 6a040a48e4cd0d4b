#include <climits>
#include <fstream>

#include "json.hpp"
#include "paperchat/digest.hpp"
#include "paperchat/errors.hpp"
#include "paperchat/llm.hpp"
#include "retry.hpp"

namespace paperchat {

std::string_view to_string(ChatModelClass model) {
  switch (model) {
    case ChatModelClass::Base: return "base";
    case ChatModelClass::Extended: return "extended";
    case ChatModelClass::Advanced: return "advanced";
    case ChatModelClass::ExaminerLarge: return "examiner-large";
    case ChatModelClass::Mock: return "mock";
  }
  return "base";
}

std::optional<ChatModelClass> parse_chat_model(std::string_view name) {
  for (auto m : {ChatModelClass::Base, ChatModelClass::Extended, ChatModelClass::Advanced,
                 ChatModelClass::ExaminerLarge, ChatModelClass::Mock}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::string request_digest(const ChatRequest& request) {
  nlohmann::json j{{"model_id", request.model_id},
                   {"prompt", request.prompt},
                   {"temperature", request.params.temperature},
                   {"max_output_tokens", request.params.max_output_tokens}};
  return sha256_hex(j.dump());
}

void LlmGateway::bind(ChatModelClass model, ChatBinding binding) {
  if (!binding.backend) throw Error(ErrorCode::InvalidArgument, "chat binding without backend");
  if (binding.max_concurrent == 0) binding.max_concurrent = 1;
  auto s = std::make_unique<Slot>();
  s->binding = std::move(binding);
  slots_[model] = std::move(s);
}

bool LlmGateway::is_bound(ChatModelClass model) const { return slots_.contains(model); }

LlmGateway::Slot& LlmGateway::slot(ChatModelClass model) const {
  auto it = slots_.find(model);
  if (it == slots_.end()) {
    throw Error(ErrorCode::InvalidArgument, "no backend bound for chat model " + std::string(to_string(model)));
  }
  return *it->second;
}

std::size_t LlmGateway::window_tokens(ChatModelClass model) const {
  switch (model) {
    case ChatModelClass::Base: return kBaseWindow;
    case ChatModelClass::Extended: return kExtendedWindow;
    case ChatModelClass::Mock: return kUnboundedWindow;
    case ChatModelClass::Advanced:
    case ChatModelClass::ExaminerLarge: {
      const std::size_t fallback = model == ChatModelClass::Advanced ? kDefaultAdvancedWindow : kDefaultExaminerWindow;
      auto it = slots_.find(model);
      if (it == slots_.end()) return fallback;
      return it->second->binding.window_tokens.value_or(fallback);
    }
  }
  return kBaseWindow;
}

ContextFit LlmGateway::enforce_context_window(ChatModelClass model, const PromptBundle& prompt) const {
  const std::size_t window = window_tokens(model);
  const long long capped = window > static_cast<std::size_t>(LLONG_MAX) ? LLONG_MAX : static_cast<long long>(window);
  return ContextFit{prompt.estimated_tokens <= window, capped - static_cast<long long>(prompt.estimated_tokens)};
}

CompletionResult LlmGateway::complete(ChatModelClass model, const PromptBundle& prompt,
                                      const CompletionParams& params, std::string_view tag) {
  Slot& s = slot(model);
  const std::size_t window = window_tokens(model);
  if (window != kUnboundedWindow &&
      (prompt.estimated_tokens > window || params.max_output_tokens > window - prompt.estimated_tokens)) {
    throw Error(ErrorCode::ContextOverflow,
                "prompt of " + std::to_string(prompt.estimated_tokens) + " tokens + " +
                    std::to_string(params.max_output_tokens) + " output tokens exceeds the " +
                    std::to_string(window) + "-token window of " + std::string(to_string(model)));
  }

  ChatRequest request{s.binding.model_id, prompt.rendered_text, prompt.estimated_tokens, params};
  {
    std::unique_lock lock(s.mutex);
    s.cv.wait(lock, [&] { return s.in_flight < s.binding.max_concurrent; });
    ++s.in_flight;
  }
  struct Release {
    Slot& s;
    ~Release() {
      {
        std::lock_guard lock(s.mutex);
        --s.in_flight;
      }
      s.cv.notify_one();
    }
  } release{s};

  CompletionResult result = detail::with_retries(retry_.max_attempts, retry_.initial_backoff,
                                                 [&] { return s.binding.backend->complete(request); });
  if (result.model_id.empty()) result.model_id = s.binding.model_id;

  std::lock_guard lock(ledger_mutex_);
  ledger_.push_back(LedgerEntry{ledger_.size(), model, result.model_id, std::string(tag), request_digest(request),
                                prompt.estimated_tokens, window, params.max_output_tokens, result.prompt_tokens,
                                result.completion_tokens, result.text});
  return result;
}

std::vector<LedgerEntry> LlmGateway::ledger() const {
  std::lock_guard lock(ledger_mutex_);
  return ledger_;
}

std::size_t LlmGateway::total_tokens() const {
  std::lock_guard lock(ledger_mutex_);
  std::size_t total = 0;
  for (const auto& e : ledger_) total += e.prompt_tokens + e.completion_tokens;
  return total;
}

void LlmGateway::write_transcript(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoError, "cannot write transcript " + path.string());
  for (const auto& e : ledger()) {
    nlohmann::json j{{"sequence", e.sequence},
                     {"model", to_string(e.model)},
                     {"model_id", e.model_id},
                     {"tag", e.tag},
                     {"digest", e.request_digest},
                     {"estimated_tokens", e.estimated_tokens},
                     {"prompt_tokens", e.prompt_tokens},
                     {"completion_tokens", e.completion_tokens},
                     {"response", e.response}};
    out << j.dump() << '\n';
  }
}

}  // namespace paperchat
