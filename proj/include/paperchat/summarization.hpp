#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "paperchat/chunking.hpp"
#include "paperchat/llm.hpp"

namespace paperchat {

enum class SummarizationMode { LocalAbstractive, LlmSummarizeRefine, MultiPageRefine };

std::string_view to_string(SummarizationMode mode);
std::optional<SummarizationMode> parse_summarization_mode(std::string_view name);

struct SummaryRecord {
  std::vector<std::size_t> source_chunk_ids;
  SummarizationMode mode = SummarizationMode::LocalAbstractive;
  std::string text;
  std::size_t token_cost = 0;
  /// Local summarizer missing or failed; text is a leading-token extract.
  bool degraded = false;
  /// Source was already at or below the minimum summary length.
  bool pass_through = false;
  /// Set when the provider failed for this chunk; text is empty.
  std::optional<std::string> error;

  bool operator==(const SummaryRecord&) const = default;
};

/// Plug-in contract for a local summarization model: text in, summary of at
/// most `max_tokens` tokens out. May throw Error{SummarizerUnavailable}.
class LocalSummarizer {
 public:
  virtual ~LocalSummarizer() = default;
  virtual std::string summarize(std::string_view text, std::size_t max_tokens) = 0;
};

/// In-process summarizer: ranks sentences by the summed frequency of their
/// content words and keeps the best ones, in source order, within budget.
class SentenceRankSummarizer final : public LocalSummarizer {
 public:
  std::string summarize(std::string_view text, std::size_t max_tokens) override;
};

struct LocalSummaryOptions {
  /// Target output/input token ratio (tunable).
  double target_ratio = 0.4;
  /// Chunks at or below this many tokens pass through unchanged.
  std::size_t min_summary_tokens = 16;
};

/// One LocalAbstractive record per chunk, token_cost 0. `summarizer` may be
/// null, in which case every record is a degraded extract.
std::vector<SummaryRecord> summarize_local(std::span<const Chunk> chunks,
                                           LocalSummarizer* summarizer,
                                           const LocalSummaryOptions& options = {});

struct FilterLogEntry {
  std::size_t chunk_id = 0;
  std::string reason;
};

struct RefineOutcome {
  std::vector<SummaryRecord> records;
  std::vector<FilterLogEntry> filter_log;
  std::size_t token_cost = 0;
};

inline constexpr std::string_view kIrrelevantMarker = "IRRELEVANT";

struct RefineOptions {
  ChatModelClass model = ChatModelClass::Base;
  double temperature = kQaTemperature;
  /// Concurrent gateway calls; records are re-assembled in chunk order.
  std::size_t max_parallel = 1;
};

/// One gateway call per chunk producing a query-focused summary. Chunks the
/// model marks IRRELEVANT are dropped and logged. Provider failures yield a
/// record with `error` set; the call never throws ProviderError.
RefineOutcome summarize_refine_llm(std::span<const Chunk> chunks, std::string_view query,
                                   LlmGateway& gateway, const RefineOptions& options = {});

struct MultiPageOptions {
  ChatModelClass model = ChatModelClass::Extended;
  double temperature = kQaTemperature;
  /// Fraction of the model window available to chunk text in a fold.
  double chunk_budget_fraction = 0.75;
  /// Optional hard cap on chunks per fold group.
  std::optional<std::size_t> max_group_chunks;
  std::size_t max_output_tokens = 2048;
};

/// Groups chunks greedily within the chunk budget (a chunk larger than the
/// budget forms its own group).
std::vector<std::vector<Chunk>> fold_groups(std::span<const Chunk> chunks, std::size_t window_tokens,
                                            const MultiPageOptions& options);

/// Sequential fold: seed a synthesis from the first group, then refine it
/// with each subsequent group, one gateway call per group. Relevant context
/// is not shortened. Throws ContextOverflow when a fold prompt cannot fit.
SummaryRecord multipage_refine(std::span<const Chunk> chunks, std::string_view query,
                               LlmGateway& gateway, const MultiPageOptions& options = {});

}  // namespace paperchat
