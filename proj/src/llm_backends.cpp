#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>

#include "http_util.hpp"
#include "json.hpp"
#include "paperchat/chunking.hpp"
#include "paperchat/digest.hpp"
#include "paperchat/errors.hpp"
#include "paperchat/llm.hpp"

namespace paperchat {

std::string mock_reply(std::string_view prompt) { return "MOCK:" + sha256_hex(prompt).substr(0, 16); }

CompletionResult MockChatBackend::complete(const ChatRequest& request) {
  {
    std::lock_guard lock(mutex_);
    ++calls_;
    if (pending_failures_ > 0) {
      --pending_failures_;
      throw Error(ErrorCode::ProviderError, "mock: injected transient failure", /*retriable=*/true);
    }
  }
  std::string text = responder_ ? responder_(request) : mock_reply(request.prompt);
  const std::size_t completion = count_tokens(text);
  return CompletionResult{std::move(text), request.estimated_tokens, completion, request.model_id};
}

void MockChatBackend::fail_next(std::size_t count) {
  std::lock_guard lock(mutex_);
  pending_failures_ = count;
}

std::size_t MockChatBackend::calls() const {
  std::lock_guard lock(mutex_);
  return calls_;
}

namespace {

std::string lower_word(std::string_view token) {
  std::string out(token);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

const std::set<std::string>& stop_words() {
  static const std::set<std::string> words{"a",   "an",   "and", "are",  "as",  "by",  "for", "from", "how",
                                           "in",  "is",   "it",  "of",   "on",  "or",  "the", "this", "that",
                                           "to",  "was",  "what", "which", "with", "paper", "please", "provide",
                                           "detailed", "findings", "response", "query"};
  return words;
}

std::set<std::string> content_words(std::string_view text) {
  std::set<std::string> out;
  for (const auto& t : tokenize(text)) {
    if (t.size() == 1 && std::ispunct(static_cast<unsigned char>(t[0]))) continue;
    auto w = lower_word(t);
    if (!stop_words().contains(w)) out.insert(std::move(w));
  }
  return out;
}

}  // namespace

std::string extractive_reply(const ChatRequest& request) {
  std::string_view prompt = request.prompt;
  const auto first_sep = prompt.find("\n\n");
  const auto last_sep = prompt.rfind("\n\n");
  std::string_view docs = prompt.substr(0, first_sep);
  std::string_view query = last_sep == std::string_view::npos ? std::string_view{} : prompt.substr(last_sep + 2);
  if (docs.starts_with(kDocsPrefix)) docs.remove_prefix(kDocsPrefix.size());
  const auto wanted = content_words(query);

  // Candidate sentences, each remembering the label of the evidence line
  // it came from.
  std::string best;
  std::size_t best_score = 0;
  std::size_t line_start = 0;
  while (line_start <= docs.size()) {
    auto line_end = docs.find('\n', line_start);
    if (line_end == std::string_view::npos) line_end = docs.size();
    std::string_view line = docs.substr(line_start, line_end - line_start);
    line_start = line_end + 1;

    std::string label;
    if (line.starts_with('[')) {
      const auto close = line.find("] ");
      if (close != std::string_view::npos) {
        label = std::string(line.substr(0, close + 1));
        line.remove_prefix(close + 2);
      }
    }
    std::size_t s = 0;
    while (s < line.size()) {
      auto e = line.find(". ", s);
      e = e == std::string_view::npos ? line.size() : e + 1;
      std::string_view sentence = line.substr(s, e - s);
      s = e + 1;
      std::size_t score = 0;
      for (const auto& w : content_words(sentence)) score += wanted.contains(w) ? 1 : 0;
      if (best.empty() || score > best_score) {
        best = std::string(sentence);
        if (!label.empty()) best += " " + label;
        best_score = score;
      }
    }
  }
  return truncate_tokens(best, std::max<std::size_t>(1, request.params.max_output_tokens));
}

ReplayChatBackend::ReplayChatBackend(const std::filesystem::path& transcript) {
  std::ifstream in(transcript, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read transcript " + transcript.string());
  std::string line;
  while (std::getline(in, line)) {
    auto j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::SchemaError, "malformed transcript line");
    responses_[j.at("digest").get<std::string>()] =
        CompletionResult{j.at("response").get<std::string>(), j.value("prompt_tokens", std::size_t{0}),
                         j.value("completion_tokens", std::size_t{0}), j.value("model_id", std::string{})};
  }
}

CompletionResult ReplayChatBackend::complete(const ChatRequest& request) {
  auto it = responses_.find(request_digest(request));
  if (it == responses_.end()) throw Error(ErrorCode::ProviderError, "replay: request not in transcript");
  return it->second;
}

OpenAIChatBackend::OpenAIChatBackend(std::string api_key, std::string base_url)
    : api_key_(std::move(api_key)), base_url_(std::move(base_url)) {}

CompletionResult OpenAIChatBackend::complete(const ChatRequest& request) {
  if (api_key_.empty()) throw Error(ErrorCode::AuthError, "OPENAI_API_KEY is not set");
  httplib::Client client(base_url_);
  client.set_read_timeout(300, 0);
  nlohmann::json body{{"model", request.model_id},
                      {"messages", nlohmann::json::array({{{"role", "user"}, {"content", request.prompt}}})},
                      {"temperature", request.params.temperature},
                      {"max_tokens", request.params.max_output_tokens}};
  auto res = client.Post("/v1/chat/completions", detail::bearer(api_key_), body.dump(), "application/json");
  detail::check_provider_response(res, "chat");

  auto reply = nlohmann::json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("choices") || reply["choices"].empty()) {
    throw Error(ErrorCode::ProviderError, "chat: malformed response");
  }
  CompletionResult result;
  const auto& content = reply["choices"][0]["message"]["content"];
  result.text = content.is_string() ? content.get<std::string>() : std::string{};
  if (reply.contains("usage")) {
    result.prompt_tokens = reply["usage"].value("prompt_tokens", std::size_t{0});
    result.completion_tokens = reply["usage"].value("completion_tokens", std::size_t{0});
  }
  result.model_id = reply.value("model", request.model_id);
  return result;
}

}  // namespace paperchat
