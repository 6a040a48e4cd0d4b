#include "paperchat/summarization.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <exception>
#include <map>
#include <set>
#include <thread>

#include <spdlog/spdlog.h>

#include "paperchat/errors.hpp"
#include "paperchat/prompt.hpp"

namespace paperchat {

std::string_view to_string(SummarizationMode mode) {
  switch (mode) {
    case SummarizationMode::LocalAbstractive: return "local-abstractive";
    case SummarizationMode::LlmSummarizeRefine: return "llm-summarize-refine";
    case SummarizationMode::MultiPageRefine: return "multi-page-refine";
  }
  return "unknown";
}

std::optional<SummarizationMode> parse_summarization_mode(std::string_view name) {
  for (auto m : {SummarizationMode::LocalAbstractive, SummarizationMode::LlmSummarizeRefine,
                 SummarizationMode::MultiPageRefine}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

namespace {

bool is_word(std::string_view token) {
  return !(token.size() == 1 && std::ispunct(static_cast<unsigned char>(token[0])));
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

const std::set<std::string>& function_words() {
  static const std::set<std::string> words{"a",  "an",  "and", "are", "as",   "at",   "be",   "by",  "for",
                                           "from", "has", "have", "in", "is", "it",  "its", "of",  "on",
                                           "or", "that", "the", "their", "this", "to", "was", "we",
                                           "were", "which", "with"};
  return words;
}

// Sentence boundaries: a '.', '!' or '?' token closes a sentence.
std::vector<std::vector<std::string>> split_sentences(std::string_view text) {
  std::vector<std::vector<std::string>> out(1);
  for (auto& t : tokenize(text)) {
    const bool end = t == "." || t == "!" || t == "?";
    out.back().push_back(std::move(t));
    if (end) out.emplace_back();
  }
  if (out.back().empty()) out.pop_back();
  return out;
}

std::string join_tokens(const std::vector<std::string>& tokens) {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t;
  }
  return out;
}

std::string strip_leading_label(std::string text, std::size_t label) {
  const std::string prefix = "[" + std::to_string(label) + "]";
  if (text.starts_with(prefix)) {
    text.erase(0, prefix.size());
    const auto first = text.find_first_not_of(" \t\n");
    text.erase(0, first == std::string::npos ? text.size() : first);
  }
  return text;
}

}  // namespace

std::string SentenceRankSummarizer::summarize(std::string_view text, std::size_t max_tokens) {
  const auto sentences = split_sentences(text);
  std::map<std::string, std::size_t> freq;
  for (const auto& s : sentences) {
    for (const auto& t : s) {
      if (is_word(t) && !function_words().contains(lower(t))) ++freq[lower(t)];
    }
  }
  std::vector<std::pair<double, std::size_t>> ranked;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    double score = 0.0;
    std::size_t words = 0;
    for (const auto& t : sentences[i]) {
      if (!is_word(t)) continue;
      ++words;
      auto it = freq.find(lower(t));
      if (it != freq.end()) score += static_cast<double>(it->second);
    }
    ranked.emplace_back(words ? score / std::sqrt(static_cast<double>(words)) : 0.0, i);
  }
  std::stable_sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) { return a.first > b.first; });

  std::vector<bool> keep(sentences.size(), false);
  std::size_t used = 0;
  for (const auto& [score, i] : ranked) {
    if (used + sentences[i].size() > max_tokens) continue;
    keep[i] = true;
    used += sentences[i].size();
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < sentences.size(); ++i) {
    if (keep[i]) out.insert(out.end(), sentences[i].begin(), sentences[i].end());
  }
  // Nothing fits whole: fall back to the head of the best sentence.
  if (out.empty() && !ranked.empty()) {
    const auto& best = sentences[ranked.front().second];
    out.assign(best.begin(), best.begin() + static_cast<std::ptrdiff_t>(std::min(max_tokens, best.size())));
  }
  return join_tokens(out);
}

std::vector<SummaryRecord> summarize_local(std::span<const Chunk> chunks, LocalSummarizer* summarizer,
                                           const LocalSummaryOptions& options) {
  if (chunks.empty()) throw Error(ErrorCode::PreconditionViolation, "summarize_local needs at least one chunk");
  std::vector<SummaryRecord> records;
  records.reserve(chunks.size());
  for (const auto& chunk : chunks) {
    SummaryRecord rec;
    rec.source_chunk_ids = {chunk.chunk_id};
    rec.mode = SummarizationMode::LocalAbstractive;
    const std::size_t n = count_tokens(chunk.text);
    if (n <= options.min_summary_tokens) {
      rec.text = chunk.text;
      rec.pass_through = true;
      records.push_back(std::move(rec));
      continue;
    }
    const auto budget = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(options.target_ratio * n)));
    bool ok = false;
    if (summarizer) {
      try {
        rec.text = summarizer->summarize(chunk.text, budget);
        if (count_tokens(rec.text) > budget) rec.text = truncate_tokens(rec.text, budget);
        ok = !rec.text.empty();
      } catch (const std::exception& e) {
        spdlog::warn("local summarizer failed on chunk {}: {}", chunk.chunk_id, e.what());
      }
    }
    if (!ok) {
      rec.text = truncate_tokens(chunk.text, budget);
      rec.degraded = true;
    }
    records.push_back(std::move(rec));
  }
  return records;
}

RefineOutcome summarize_refine_llm(std::span<const Chunk> chunks, std::string_view query, LlmGateway& gateway,
                                   const RefineOptions& options) {
  struct Slot {
    std::optional<SummaryRecord> record;
    std::optional<FilterLogEntry> filtered;
  };
  std::vector<Slot> slots(chunks.size());
  std::atomic<std::size_t> next{0};

  auto work = [&] {
    for (std::size_t i = next++; i < chunks.size(); i = next++) {
      const Chunk& chunk = chunks[i];
      const std::size_t source_tokens = std::max<std::size_t>(1, count_tokens(chunk.text));
      PromptParts parts{std::string(kDocsPrefix) + render_chunk(chunk).body,
                        std::string(chunk_refine_instructions()), "Query: " + std::string(query)};
      SummaryRecord rec;
      rec.source_chunk_ids = {chunk.chunk_id};
      rec.mode = SummarizationMode::LlmSummarizeRefine;
      try {
        auto result = gateway.complete(options.model, make_prompt(std::move(parts)),
                                       CompletionParams{options.temperature, source_tokens}, "refine");
        rec.token_cost = result.prompt_tokens + result.completion_tokens;
        std::string text = strip_leading_label(result.text, chunk.page_label);
        const auto trimmed_begin = text.find_first_not_of(" \t\n");
        if (trimmed_begin != std::string::npos && text.compare(trimmed_begin, kIrrelevantMarker.size(),
                                                               kIrrelevantMarker) == 0 &&
            count_tokens(text) <= 2) {
          slots[i].filtered = FilterLogEntry{chunk.chunk_id, "model marked chunk irrelevant"};
          slots[i].record = std::move(rec);  // kept only for its token cost
          continue;
        }
        rec.text = count_tokens(text) > source_tokens ? truncate_tokens(text, source_tokens) : text;
      } catch (const Error& e) {
        if (e.code() != ErrorCode::ProviderError && e.code() != ErrorCode::AuthError) throw;
        rec.error = std::string(to_string(e.code())) + ": " + e.what();
      }
      slots[i].record = std::move(rec);
    }
  };

  const std::size_t workers = std::clamp<std::size_t>(options.max_parallel, 1, std::max<std::size_t>(1, chunks.size()));
  if (workers == 1) {
    work();
  } else {
    std::vector<std::exception_ptr> errors(workers);
    {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          try {
            work();
          } catch (...) {
            errors[w] = std::current_exception();
            next = chunks.size();
          }
        });
      }
    }
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  RefineOutcome out;
  for (auto& slot : slots) {
    if (!slot.record) continue;
    out.token_cost += slot.record->token_cost;
    if (slot.filtered) {
      out.filter_log.push_back(*slot.filtered);
      continue;
    }
    out.records.push_back(std::move(*slot.record));
  }
  return out;
}

std::vector<std::vector<Chunk>> fold_groups(std::span<const Chunk> chunks, std::size_t window_tokens,
                                            const MultiPageOptions& options) {
  const double budget_d = options.chunk_budget_fraction * static_cast<double>(window_tokens);
  const std::size_t budget = window_tokens == kUnboundedWindow
                                 ? kUnboundedWindow
                                 : static_cast<std::size_t>(std::floor(budget_d));
  std::vector<std::vector<Chunk>> groups;
  std::size_t used = 0;
  for (const auto& chunk : chunks) {
    const std::size_t cost = count_tokens(render_chunk(chunk).body);
    const bool full = !groups.empty() &&
                      ((options.max_group_chunks && groups.back().size() >= *options.max_group_chunks) ||
                       used + cost > budget);
    if (groups.empty() || full) {
      groups.emplace_back();
      used = 0;
    }
    groups.back().push_back(chunk);
    used += cost;
  }
  return groups;
}

SummaryRecord multipage_refine(std::span<const Chunk> chunks, std::string_view query, LlmGateway& gateway,
                               const MultiPageOptions& options) {
  if (chunks.empty()) throw Error(ErrorCode::PreconditionViolation, "multipage_refine needs at least one chunk");
  const std::size_t window = gateway.window_tokens(options.model);
  const auto groups = fold_groups(chunks, window, options);

  SummaryRecord rec;
  rec.mode = SummarizationMode::MultiPageRefine;
  for (const auto& c : chunks) rec.source_chunk_ids.push_back(c.chunk_id);

  std::string synthesis;
  for (std::size_t g = 0; g < groups.size(); ++g) {
    std::string docs;
    if (g > 0) docs = "Current synthesis: " + synthesis + "\n";
    docs += kDocsPrefix;
    for (std::size_t i = 0; i < groups[g].size(); ++i) {
      if (i > 0) docs += '\n';
      docs += render_chunk(groups[g][i]).body;
    }
    auto prompt = make_prompt(PromptParts{
        std::move(docs),
        std::string(g == 0 ? multipage_seed_instructions() : multipage_fold_instructions()),
        "Query: " + std::string(query)});

    // Output may use whatever the window leaves; an over-long prompt is
    // left for the gateway to reject.
    CompletionParams params{options.temperature, options.max_output_tokens};
    if (window != kUnboundedWindow && prompt.estimated_tokens < window) {
      params.max_output_tokens = std::min(params.max_output_tokens, window - prompt.estimated_tokens);
    }
    auto result = gateway.complete(options.model, prompt, params, g == 0 ? "multipage-seed" : "multipage-fold");
    rec.token_cost += result.prompt_tokens + result.completion_tokens;
    synthesis = std::move(result.text);
  }
  rec.text = std::move(synthesis);
  return rec;
}

}  // namespace paperchat
