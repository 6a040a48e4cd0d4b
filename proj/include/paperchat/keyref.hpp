#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paperchat/document.hpp"
#include "paperchat/llm.hpp"
#include "paperchat/orchestrator.hpp"

namespace paperchat {

/// Casefold, turn punctuation into spaces, collapse and trim whitespace.
std::string normalize_title(std::string_view text);

enum class MatchConfidence { Exact, Fuzzy };

std::string_view to_string(MatchConfidence confidence);

struct TitleMatch {
  Reference reference;
  std::size_t reference_index = 0;
  MatchConfidence confidence = MatchConfidence::Exact;
  /// The model output line the match was found on.
  std::string rationale;
};

inline constexpr double kDefaultFuzzyThreshold = 0.6;

/// A reference matches Exact when its normalized title occurs in the
/// normalized output, Fuzzy when its title tokens have Jaccard similarity
/// >= `fuzzy_threshold` with some output line or one of its bracketed or
/// comma-separated fields. Results follow reference order.
std::vector<TitleMatch> match_titles(std::string_view model_output,
                                     std::span<const Reference> references,
                                     double fuzzy_threshold = kDefaultFuzzyThreshold);

struct KeyReferenceResult {
  std::vector<TitleMatch> matched;
  std::string raw_model_output;
  PromptBundle prompt;
  std::size_t token_cost = 0;
};

struct KeyRefOptions {
  double fuzzy_threshold = kDefaultFuzzyThreshold;
  std::size_t max_output_tokens = 512;
};

/// Concatenates cached summaries (newest last, trimmed from the oldest end
/// to fit the window), adds the abstract and reference titles, asks the
/// current tier's chat model at temperature 0, and binds its output to the
/// reference list. Throws NoReferences.
KeyReferenceResult find_key_references(const ConversationMemory& memory, const Paper& paper,
                                       LlmGateway& gateway, const KeyRefOptions& options = {});

}  // namespace paperchat
