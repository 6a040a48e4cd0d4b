#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "json.hpp"
#include "paperchat/embedding.hpp"
#include "paperchat/keyref.hpp"
#include "paperchat/llm.hpp"
#include "paperchat/orchestrator.hpp"
#include "paperchat/summarization.hpp"

namespace paperchat {

enum class ProviderKind {
  Auto,        // OpenAI when OPENAI_API_KEY is set, Mock otherwise
  Mock,        // hash embeddings + MockChatBackend
  Extractive,  // hash embeddings + evidence-echo chat backend
  OpenAI,
};

std::optional<ProviderKind> parse_provider_kind(std::string_view name);

inline constexpr int kDefaultPort = 7860;

struct ServiceConfig {
  int listen_port = kDefaultPort;
  std::filesystem::path data_dir = "paperchat-data";
  std::string parser_url;
  AssistanceTier default_tier = AssistanceTier::Entry;
  ProviderKind provider = ProviderKind::Auto;
  std::string openai_api_key;
  std::string openai_base_url = "https://api.openai.com";
  /// Overrides for the provider model id bound to each class.
  std::map<EmbeddingModelClass, std::string> embedding_model_ids;
  std::map<ChatModelClass, std::string> chat_model_ids;
  std::optional<std::size_t> advanced_window;
  std::optional<std::size_t> examiner_window;
  std::size_t refine_parallelism = 4;
  RetryPolicy retry;
  std::optional<std::filesystem::path> ui_dir;

  /// Defaults overlaid with PORT, PARSER_URL, OPENAI_API_KEY,
  /// OPENAI_BASE_URL and PAPERCHAT_DATA_DIR.
  static ServiceConfig from_environment();
  /// Overlays keys of a JSON config document onto `base`.
  static ServiceConfig from_json(const nlohmann::json& j, ServiceConfig base);

  /// Throws InvalidArgument for a port outside 1..65535.
  void validate() const;
};

struct ProviderSet {
  std::shared_ptr<EmbeddingEngine> embeddings;
  std::shared_ptr<LlmGateway> gateway;
  std::shared_ptr<LocalSummarizer> summarizer;
};

/// Binds every embedding and chat model class for the configured provider
/// kind, with the embedding cache persisted under data_dir.
ProviderSet make_providers(const ServiceConfig& config);

enum class MessageRole { User, Assistant, System };

struct ApiMessage {
  std::string conversation_id;
  MessageRole role = MessageRole::Assistant;
  std::string text;
  AssistanceTier tier = AssistanceTier::Entry;
  std::size_t token_cost = 0;
  std::vector<std::size_t> citations;

  bool operator==(const ApiMessage&) const = default;
};

nlohmann::json to_json(const ApiMessage& message);
nlohmann::json to_json(const KeyReferenceResult& result);

struct IngestResult {
  std::string document_id;
  std::string title;
  bool created = false;
};

struct HelpResult {
  AssistanceTier tier = AssistanceTier::Entry;
  bool changed = false;
  ApiMessage reanswer;
};

/// Transport-independent service core shared by the HTTP server and the
/// CLI. State lives under data_dir: `documents/<id>.json` blobs and
/// `conversations/<id>.jsonl` logs, replayed on construction. Requests on
/// one conversation are serialized; distinct conversations run
/// concurrently.
class Service {
 public:
  explicit Service(ServiceConfig config);
  Service(ServiceConfig config, ProviderSet providers);

  const ServiceConfig& config() const { return config_; }
  ProviderSet& providers() { return providers_; }
  Orchestrator& orchestrator() { return *orchestrator_; }

  IngestResult ingest_parse(const nlohmann::json& raw);
  /// Asks the parser service at parser_url to parse a PDF URL. Throws
  /// ParserUnavailable when it cannot be reached or fails.
  IngestResult ingest_url(const std::string& url);
  /// A `.json` file is an inline parse; anything else is uploaded to the
  /// parser service as a PDF.
  IngestResult ingest_file(const std::filesystem::path& path);

  std::shared_ptr<const DocumentIndex> document(const std::string& document_id) const;
  std::vector<std::string> document_ids() const;

  std::string create_conversation(const std::string& document_id);
  std::vector<std::string> conversation_ids() const;
  ConversationMemory memory(const std::string& conversation_id) const;
  std::vector<ApiMessage> messages(const std::string& conversation_id) const;

  ApiMessage post_message(const std::string& conversation_id, const std::string& query,
                          PipelineTrace* trace = nullptr);
  /// Escalates and re-answers the latest query. Throws Conflict when the
  /// conversation has no query yet.
  HelpResult help(const std::string& conversation_id);
  /// `conversation_id` may be empty (no cached summaries).
  KeyReferenceResult key_references(const std::string& document_id,
                                    const std::string& conversation_id);

  nlohmann::json health() const;

 private:
  struct ConversationSlot {
    std::mutex mutex;
    ConversationMemory memory;
  };

  void replay_state();
  IngestResult register_document(Paper paper);
  std::shared_ptr<ConversationSlot> slot(const std::string& conversation_id) const;
  ApiMessage answer_locked(ConversationSlot& slot, const std::string& query,
                           PipelineTrace* trace);
  std::filesystem::path conversation_path(const std::string& conversation_id) const;

  ServiceConfig config_;
  ProviderSet providers_;
  std::unique_ptr<Orchestrator> orchestrator_;
  mutable std::shared_mutex mutex_;
  std::map<std::string, std::shared_ptr<const DocumentIndex>> documents_;
  std::map<std::string, std::shared_ptr<ConversationSlot>> conversations_;
};

/// Messages a conversation shows: one user and one assistant message per
/// memory entry.
std::vector<ApiMessage> messages_from_memory(const ConversationMemory& memory);

}  // namespace paperchat
