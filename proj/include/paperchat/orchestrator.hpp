#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"
#include "paperchat/chunking.hpp"
#include "paperchat/document.hpp"
#include "paperchat/embedding.hpp"
#include "paperchat/llm.hpp"
#include "paperchat/retrieval.hpp"
#include "paperchat/summarization.hpp"
#include "paperchat/tier.hpp"

namespace paperchat {

/// Everything a tier wires into the answer pipeline. `summarization` is
/// empty for the raw-chunk pipeline used by retrieval ablations.
struct TierConfig {
  EmbeddingModelClass embedding_model = EmbeddingModelClass::Ada;
  RetrievalConfig retrieval;
  std::optional<SummarizationMode> summarization;
  ChatModelClass chat_model = ChatModelClass::Base;
  /// Model used for multi-page refinement (Extreme only).
  std::optional<ChatModelClass> refine_model;

  bool operator==(const TierConfig&) const = default;
};

TierConfig tier_config(AssistanceTier tier);

struct MemoryEntry {
  std::string query;
  AssistanceTier tier = AssistanceTier::Entry;
  std::vector<std::size_t> retrieved_chunk_ids;
  std::vector<SummaryRecord> summaries;
  std::string answer;
  std::size_t token_cost = 0;

  bool operator==(const MemoryEntry&) const = default;
};

struct EscalationResult {
  AssistanceTier new_tier = AssistanceTier::Entry;
  bool changed = false;
};

/// Per-conversation cache of interactions. Entries are append-only and the
/// tier never decreases.
class ConversationMemory {
 public:
  ConversationMemory() = default;
  ConversationMemory(std::string conversation_id, std::string document_id,
                     AssistanceTier initial_tier = AssistanceTier::Entry)
      : conversation_id_(std::move(conversation_id)),
        document_id_(std::move(document_id)),
        current_tier_(initial_tier) {}

  const std::string& conversation_id() const { return conversation_id_; }
  const std::string& document_id() const { return document_id_; }
  AssistanceTier current_tier() const { return current_tier_; }
  const std::vector<MemoryEntry>& entries() const { return entries_; }

  void append(MemoryEntry entry) { entries_.push_back(std::move(entry)); }
  /// Raises the tier to `tier` if higher; used by log replay.
  void raise_tier(AssistanceTier tier);

  bool operator==(const ConversationMemory&) const = default;

 private:
  std::string conversation_id_;
  std::string document_id_;
  AssistanceTier current_tier_ = AssistanceTier::Entry;
  std::vector<MemoryEntry> entries_;
};

EscalationResult escalate(ConversationMemory& memory);

/// An ingested paper plus lazily built chunkings (per segment size) and
/// chunk embeddings (per model class and segment size).
class DocumentIndex {
 public:
  DocumentIndex(Paper paper, std::string document_id);

  const Paper& paper() const { return paper_; }
  const std::string& document_id() const { return document_id_; }
  const CorpusView& corpus() const { return corpus_; }

  std::shared_ptr<const std::vector<Chunk>> chunks(std::size_t segment_size) const;

  /// Embeddings of chunks(segment_size) under `model`; computed once.
  /// `computed` reports whether this call hit the embedding engine.
  std::shared_ptr<const std::vector<ChunkEmbedding>> chunk_embeddings(
      EmbeddingEngine& engine, EmbeddingModelClass model, std::size_t segment_size,
      bool* computed = nullptr) const;

 private:
  Paper paper_;
  std::string document_id_;
  CorpusView corpus_;
  mutable std::mutex mutex_;
  mutable std::map<std::size_t, std::shared_ptr<const std::vector<Chunk>>> chunkings_;
  mutable std::map<std::pair<EmbeddingModelClass, std::size_t>,
                   std::shared_ptr<const std::vector<ChunkEmbedding>>>
      embeddings_;
};

struct Answer {
  std::string text;
  AssistanceTier tier_used = AssistanceTier::Entry;
  std::size_t token_cost = 0;
  std::vector<RetrievalHit> evidence;
  std::vector<SummaryRecord> summaries;
  /// Page labels cited in `text` as "[n]" or "[Page n]".
  std::vector<std::size_t> citations;
  /// Cited labels that are not among the evidence labels (flagged only).
  std::vector<std::size_t> unsupported_citations;
  PromptBundle prompt;
};

/// Page labels cited in `text`, in order of first appearance.
std::vector<std::size_t> extract_citations(std::string_view text);

/// One step of an executed pipeline, for conformance checks.
struct PipelineStep {
  std::string stage;
  std::string detail;

  bool operator==(const PipelineStep&) const = default;
};
using PipelineTrace = std::vector<PipelineStep>;

struct OrchestratorOptions {
  LocalSummaryOptions local_summary;
  std::size_t refine_parallelism = 1;
  std::size_t qa_max_output_tokens = 512;
  std::size_t multipage_max_output_tokens = 2048;
};

/// Runs the per-tier pipeline: embed query, retrieve, summarize, build the
/// QA prompt, complete.
class Orchestrator {
 public:
  Orchestrator(EmbeddingEngine& embeddings, LlmGateway& gateway, LocalSummarizer* summarizer,
               OrchestratorOptions options = {});

  /// Answers at the memory's current tier and appends the interaction.
  /// Throws DocumentNotIngested when `document` is null.
  Answer answer(std::string_view query, ConversationMemory& memory, const DocumentIndex* document,
                PipelineTrace* trace = nullptr);

  /// Stateless pipeline run for an explicit configuration.
  Answer run_pipeline(std::string_view query, const DocumentIndex& document,
                      const TierConfig& config, AssistanceTier tier_label,
                      PipelineTrace* trace = nullptr);

 private:
  EmbeddingEngine& embeddings_;
  LlmGateway& gateway_;
  LocalSummarizer* summarizer_;
  OrchestratorOptions options_;
};

/// Append-only on-disk log of one conversation (JSON lines). Replaying the
/// events reconstructs the ConversationMemory.
class ConversationLog {
 public:
  explicit ConversationLog(std::filesystem::path path) : path_(std::move(path)) {}

  void record_created(const ConversationMemory& memory) const;
  void record_entry(const MemoryEntry& entry) const;
  void record_escalation(AssistanceTier tier) const;

  static ConversationMemory replay(const std::filesystem::path& path);

 private:
  void append(const nlohmann::json& event) const;
  std::filesystem::path path_;
};

nlohmann::json to_json(const SummaryRecord& record);
SummaryRecord summary_from_json(const nlohmann::json& j);
nlohmann::json to_json(const MemoryEntry& entry);
MemoryEntry memory_entry_from_json(const nlohmann::json& j);

}  // namespace paperchat
