#include "paperchat/keyref.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "paperchat/errors.hpp"
#include "paperchat/prompt.hpp"

namespace paperchat {

std::string normalize_title(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (unsigned char c : text) {
    if (std::isspace(c) || std::ispunct(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out += ' ';
    pending_space = false;
    out += static_cast<char>(std::tolower(c));
  }
  return out;
}

std::string_view to_string(MatchConfidence confidence) {
  return confidence == MatchConfidence::Exact ? "exact" : "fuzzy";
}

namespace {

std::set<std::string> token_set(const std::string& normalized) {
  std::set<std::string> out;
  std::istringstream in(normalized);
  for (std::string w; in >> w;) out.insert(w);
  return out;
}

double jaccard(const std::set<std::string>& a, const std::set<std::string>& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  for (const auto& w : a) inter += b.contains(w) ? 1 : 0;
  return static_cast<double>(inter) / static_cast<double>(a.size() + b.size() - inter);
}

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    lines.emplace_back(text.substr(start, end - start));
    start = end + 1;
  }
  return lines;
}

// Token sets for a line and for each of its "[...]"/comma/colon-delimited
// fields, so a title inside "Key Reference: [title, authors, year]" is
// compared on its own.
std::vector<std::set<std::string>> line_candidates(const std::string& line) {
  std::vector<std::set<std::string>> out{token_set(normalize_title(line))};
  std::string field;
  for (char c : line + ",") {
    if (c == '[' || c == ']' || c == ',' || c == ':' || c == ';') {
      auto tokens = token_set(normalize_title(field));
      if (!tokens.empty()) out.push_back(std::move(tokens));
      field.clear();
    } else {
      field += c;
    }
  }
  return out;
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<TitleMatch> match_titles(std::string_view model_output, std::span<const Reference> references,
                                     double fuzzy_threshold) {
  const std::string normalized_output = normalize_title(model_output);
  const auto lines = split_lines(model_output);
  std::vector<std::string> normalized_lines;
  std::vector<std::vector<std::set<std::string>>> line_tokens;
  for (const auto& l : lines) {
    normalized_lines.push_back(normalize_title(l));
    line_tokens.push_back(line_candidates(l));
  }

  std::vector<TitleMatch> out;
  for (std::size_t i = 0; i < references.size(); ++i) {
    const std::string title = normalize_title(references[i].title);
    if (title.empty()) continue;
    const auto padded = " " + normalized_output + " ";
    if (padded.find(" " + title + " ") != std::string::npos) {
      std::string rationale = trim(std::string(model_output));
      for (std::size_t l = 0; l < lines.size(); ++l) {
        if ((" " + normalized_lines[l] + " ").find(" " + title + " ") != std::string::npos) {
          rationale = trim(lines[l]);
          break;
        }
      }
      out.push_back({references[i], i, MatchConfidence::Exact, std::move(rationale)});
      continue;
    }
    const auto title_tokens = token_set(title);
    for (std::size_t l = 0; l < lines.size(); ++l) {
      const bool hit = std::any_of(line_tokens[l].begin(), line_tokens[l].end(),
                                   [&](const auto& c) { return jaccard(title_tokens, c) >= fuzzy_threshold; });
      if (hit) {
        out.push_back({references[i], i, MatchConfidence::Fuzzy, trim(lines[l])});
        break;
      }
    }
  }
  return out;
}

KeyReferenceResult find_key_references(const ConversationMemory& memory, const Paper& paper, LlmGateway& gateway,
                                       const KeyRefOptions& options) {
  if (paper.references.empty()) throw Error(ErrorCode::NoReferences, "paper has no references");
  const ChatModelClass model = tier_config(memory.current_tier()).chat_model;

  std::string summaries;
  for (const auto& entry : memory.entries()) {
    for (const auto& s : entry.summaries) {
      if (s.error || s.text.empty()) continue;
      if (!summaries.empty()) summaries += '\n';
      summaries += s.text;
    }
  }

  // Keep the newest summaries that fit alongside the rest of the prompt.
  const std::size_t window = gateway.window_tokens(model);
  if (!summaries.empty() && window != kUnboundedWindow) {
    const auto base = build_keyref_prompt({}, paper.abstract.empty() ? std::string_view("-") : paper.abstract,
                                          paper.references);
    const std::size_t overhead = base.estimated_tokens + options.max_output_tokens + 4;  // "Paper summary:" header
    const std::size_t budget = window > overhead ? window - overhead : 0;
    if (count_tokens(summaries) > budget) summaries = budget ? tail_tokens(summaries, budget) : std::string{};
  }

  KeyReferenceResult result;
  result.prompt = build_keyref_prompt(summaries, paper.abstract, paper.references);
  auto reply = gateway.complete(model, result.prompt, CompletionParams{kJudgeTemperature, options.max_output_tokens},
                                "keyref");
  result.token_cost = reply.prompt_tokens + reply.completion_tokens;
  result.raw_model_output = std::move(reply.text);
  result.matched = match_titles(result.raw_model_output, paper.references, options.fuzzy_threshold);
  return result;
}

}  // namespace paperchat
