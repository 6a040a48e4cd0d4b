#include "paperchat/orchestrator.hpp"

#include <algorithm>
#include <regex>
#include <set>

#include <spdlog/spdlog.h>

#include "paperchat/errors.hpp"
#include "paperchat/prompt.hpp"

namespace paperchat {

TierConfig tier_config(AssistanceTier tier) {
  switch (tier) {
    case AssistanceTier::Entry:
      return {EmbeddingModelClass::Ada, {RetrievalStrategy::Cosine, 5, 150},
              SummarizationMode::LocalAbstractive, ChatModelClass::Base, std::nullopt};
    case AssistanceTier::Intermediate:
      return {EmbeddingModelClass::Ada, {RetrievalStrategy::Knn, 5, 300},
              SummarizationMode::LlmSummarizeRefine, ChatModelClass::Base, std::nullopt};
    case AssistanceTier::Extreme:
      return {EmbeddingModelClass::Davinci, {RetrievalStrategy::Knn, 6, 512},
              SummarizationMode::MultiPageRefine, ChatModelClass::Advanced, ChatModelClass::Extended};
  }
  throw Error(ErrorCode::InvalidArgument, "unknown tier");
}

void ConversationMemory::raise_tier(AssistanceTier tier) {
  if (tier > current_tier_) current_tier_ = tier;
}

EscalationResult escalate(ConversationMemory& memory) {
  const auto before = memory.current_tier();
  if (before == AssistanceTier::Extreme) return {before, false};
  const auto next = static_cast<AssistanceTier>(static_cast<int>(before) + 1);
  memory.raise_tier(next);
  return {next, true};
}

DocumentIndex::DocumentIndex(Paper paper, std::string document_id)
    : paper_(std::move(paper)), document_id_(std::move(document_id)), corpus_(strip_references(paper_, document_id_)) {}

std::shared_ptr<const std::vector<Chunk>> DocumentIndex::chunks(std::size_t segment_size) const {
  std::lock_guard lock(mutex_);
  auto& slot = chunkings_[segment_size];
  if (!slot) slot = std::make_shared<const std::vector<Chunk>>(segment(corpus_, ChunkingConfig{segment_size}));
  return slot;
}

std::shared_ptr<const std::vector<ChunkEmbedding>> DocumentIndex::chunk_embeddings(EmbeddingEngine& engine,
                                                                                   EmbeddingModelClass model,
                                                                                   std::size_t segment_size,
                                                                                   bool* computed) const {
  if (computed) *computed = false;
  const auto key = std::make_pair(model, segment_size);
  {
    std::lock_guard lock(mutex_);
    if (auto it = embeddings_.find(key); it != embeddings_.end()) return it->second;
  }
  const auto chunk_list = chunks(segment_size);
  std::vector<std::string> texts;
  texts.reserve(chunk_list->size());
  for (const auto& c : *chunk_list) texts.push_back(c.text);
  auto vectors = engine.embed_texts(model, texts);

  auto built = std::make_shared<std::vector<ChunkEmbedding>>();
  built->reserve(vectors.size());
  for (std::size_t i = 0; i < vectors.size(); ++i) {
    built->push_back(ChunkEmbedding{(*chunk_list)[i].chunk_id, std::move(vectors[i])});
  }
  std::lock_guard lock(mutex_);
  auto [it, inserted] = embeddings_.emplace(key, std::move(built));
  if (computed) *computed = inserted;
  return it->second;
}

std::vector<std::size_t> extract_citations(std::string_view text) {
  static const std::regex pattern(R"(\[(?:Page\s*)?(\d+)\])", std::regex::icase);
  std::vector<std::size_t> out;
  std::set<std::size_t> seen;
  const std::string s(text);
  for (auto it = std::sregex_iterator(s.begin(), s.end(), pattern); it != std::sregex_iterator(); ++it) {
    const auto& digits = (*it)[1].str();
    if (digits.size() > 9) continue;
    const auto label = static_cast<std::size_t>(std::stoull(digits));
    if (seen.insert(label).second) out.push_back(label);
  }
  return out;
}

Orchestrator::Orchestrator(EmbeddingEngine& embeddings, LlmGateway& gateway, LocalSummarizer* summarizer,
                           OrchestratorOptions options)
    : embeddings_(embeddings), gateway_(gateway), summarizer_(summarizer), options_(options) {}

namespace {

void step(PipelineTrace* trace, std::string stage, std::string detail) {
  if (trace) trace->push_back({std::move(stage), std::move(detail)});
}

std::string retrieval_detail(const TierConfig& config) {
  return std::string(to_string(config.retrieval.strategy)) + " S=" + std::to_string(config.retrieval.segment_size) +
         " k=" + std::to_string(config.retrieval.top_k);
}

}  // namespace

Answer Orchestrator::run_pipeline(std::string_view query, const DocumentIndex& document, const TierConfig& config,
                                  AssistanceTier tier_label, PipelineTrace* trace) {
  if (query.empty()) throw Error(ErrorCode::PreconditionViolation, "query must not be empty");
  const std::size_t S = config.retrieval.segment_size;
  const std::string model_name(to_string(config.embedding_model));

  bool computed = false;
  const auto chunk_vectors = document.chunk_embeddings(embeddings_, config.embedding_model, S, &computed);
  if (computed) step(trace, "embed-chunks", model_name + " S=" + std::to_string(S));

  const std::vector<std::string> query_text{std::string(query)};
  const auto query_vec = embeddings_.embed_texts(config.embedding_model, query_text).front();
  step(trace, "embed-query", model_name);

  Answer answer;
  answer.tier_used = tier_label;
  answer.evidence = retrieve(*chunk_vectors, query_vec, config.retrieval);
  step(trace, "retrieve", retrieval_detail(config));

  const auto chunks = document.chunks(S);
  std::vector<Chunk> selected;
  for (const auto& hit : answer.evidence) selected.push_back((*chunks)[hit.chunk_id]);
  if (selected.empty()) throw Error(ErrorCode::EmptyEvidence, "retrieval returned no chunks");

  std::vector<EvidenceItem> evidence;
  auto raw_evidence = [&] {
    for (const auto& c : selected) evidence.push_back({c.page_label, c.text});
  };

  if (!config.summarization) {
    raw_evidence();
  } else {
    switch (*config.summarization) {
      case SummarizationMode::LocalAbstractive: {
        answer.summaries = summarize_local(selected, summarizer_, options_.local_summary);
        step(trace, "summarize", "local-abstractive n=" + std::to_string(selected.size()));
        for (std::size_t i = 0; i < selected.size(); ++i) {
          evidence.push_back({selected[i].page_label, answer.summaries[i].text});
        }
        break;
      }
      case SummarizationMode::LlmSummarizeRefine: {
        RefineOptions ro;
        ro.model = config.chat_model;
        ro.max_parallel = options_.refine_parallelism;
        auto outcome = summarize_refine_llm(selected, query, gateway_, ro);
        for (const auto& c : selected) {
          step(trace, "llm", std::string(to_string(ro.model)) + " refine chunk=" + std::to_string(c.chunk_id));
        }
        answer.token_cost += outcome.token_cost;
        std::size_t failed = 0;
        std::string last_error;
        for (auto& rec : outcome.records) {
          if (rec.error) {
            ++failed;
            last_error = *rec.error;
            spdlog::warn("refine failed for chunk {}: {}", rec.source_chunk_ids.front(), *rec.error);
            continue;
          }
          evidence.push_back({(*chunks)[rec.source_chunk_ids.front()].page_label, rec.text});
          answer.summaries.push_back(std::move(rec));
        }
        if (evidence.empty()) {
          if (failed > 0) throw Error(ErrorCode::ProviderError, "every refine call failed: " + last_error, true);
          // Everything was filtered as irrelevant: answer from the raw chunks.
          spdlog::info("all {} retrieved chunks filtered; using raw chunks", selected.size());
          raw_evidence();
        }
        break;
      }
      case SummarizationMode::MultiPageRefine: {
        MultiPageOptions mo;
        mo.model = config.refine_model.value_or(ChatModelClass::Extended);
        mo.max_output_tokens = options_.multipage_max_output_tokens;
        const auto groups = fold_groups(selected, gateway_.window_tokens(mo.model), mo);
        for (std::size_t g = 0; g < groups.size(); ++g) {
          step(trace, "llm", std::string(to_string(mo.model)) + (g == 0 ? " multipage-seed" : " multipage-fold"));
        }
        auto rec = multipage_refine(selected, query, gateway_, mo);
        answer.token_cost += rec.token_cost;
        evidence.push_back({std::nullopt, rec.text});
        answer.summaries.push_back(std::move(rec));
        break;
      }
    }
  }

  answer.prompt = build_qa_prompt(evidence, query);
  step(trace, "llm", std::string(to_string(config.chat_model)) + " qa");
  auto result = gateway_.complete(config.chat_model, answer.prompt,
                                  CompletionParams{kQaTemperature, options_.qa_max_output_tokens}, "qa");
  answer.token_cost += result.prompt_tokens + result.completion_tokens;
  answer.text = std::move(result.text);

  std::set<std::size_t> labels;
  for (const auto& c : selected) labels.insert(c.page_label);
  answer.citations = extract_citations(answer.text);
  for (auto label : answer.citations) {
    if (!labels.contains(label)) answer.unsupported_citations.push_back(label);
  }
  if (!answer.unsupported_citations.empty()) {
    spdlog::warn("answer cites {} label(s) outside its evidence", answer.unsupported_citations.size());
  }
  return answer;
}

Answer Orchestrator::answer(std::string_view query, ConversationMemory& memory, const DocumentIndex* document,
                            PipelineTrace* trace) {
  if (!document) throw Error(ErrorCode::DocumentNotIngested, "no ingested document for this conversation");
  if (!memory.document_id().empty() && memory.document_id() != document->document_id()) {
    throw Error(ErrorCode::InvalidArgument, "conversation belongs to a different document");
  }
  const auto tier = memory.current_tier();
  Answer out = run_pipeline(query, *document, tier_config(tier), tier, trace);

  MemoryEntry entry;
  entry.query = std::string(query);
  entry.tier = tier;
  for (const auto& hit : out.evidence) entry.retrieved_chunk_ids.push_back(hit.chunk_id);
  entry.summaries = out.summaries;
  entry.answer = out.text;
  entry.token_cost = out.token_cost;
  memory.append(std::move(entry));
  return out;
}

nlohmann::json to_json(const SummaryRecord& record) {
  nlohmann::json j{{"source_chunk_ids", record.source_chunk_ids},
                   {"mode", to_string(record.mode)},
                   {"text", record.text},
                   {"token_cost", record.token_cost},
                   {"degraded", record.degraded},
                   {"pass_through", record.pass_through}};
  j["error"] = record.error ? nlohmann::json(*record.error) : nlohmann::json(nullptr);
  return j;
}

SummaryRecord summary_from_json(const nlohmann::json& j) {
  SummaryRecord r;
  r.source_chunk_ids = j.at("source_chunk_ids").get<std::vector<std::size_t>>();
  auto mode = parse_summarization_mode(j.at("mode").get<std::string>());
  if (!mode) throw Error(ErrorCode::SchemaError, "unknown summarization mode");
  r.mode = *mode;
  r.text = j.at("text").get<std::string>();
  r.token_cost = j.at("token_cost").get<std::size_t>();
  r.degraded = j.value("degraded", false);
  r.pass_through = j.value("pass_through", false);
  if (j.contains("error") && j["error"].is_string()) r.error = j["error"].get<std::string>();
  return r;
}

nlohmann::json to_json(const MemoryEntry& entry) {
  nlohmann::json summaries = nlohmann::json::array();
  for (const auto& s : entry.summaries) summaries.push_back(to_json(s));
  return {{"query", entry.query},
          {"tier", to_string(entry.tier)},
          {"retrieved_chunk_ids", entry.retrieved_chunk_ids},
          {"summaries", std::move(summaries)},
          {"answer", entry.answer},
          {"token_cost", entry.token_cost}};
}

MemoryEntry memory_entry_from_json(const nlohmann::json& j) {
  MemoryEntry e;
  e.query = j.at("query").get<std::string>();
  auto tier = parse_tier(j.at("tier").get<std::string>());
  if (!tier) throw Error(ErrorCode::SchemaError, "unknown tier in memory entry");
  e.tier = *tier;
  e.retrieved_chunk_ids = j.at("retrieved_chunk_ids").get<std::vector<std::size_t>>();
  for (const auto& s : j.at("summaries")) e.summaries.push_back(summary_from_json(s));
  e.answer = j.at("answer").get<std::string>();
  e.token_cost = j.at("token_cost").get<std::size_t>();
  return e;
}

}  // namespace paperchat
