#include "paperchat/service.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <spdlog/spdlog.h>

#include "httplib.h"
#include "paperchat/digest.hpp"
#include "paperchat/embedding_cache.hpp"
#include "paperchat/errors.hpp"

namespace paperchat {

namespace fs = std::filesystem;

std::optional<ProviderKind> parse_provider_kind(std::string_view name) {
  if (name == "auto") return ProviderKind::Auto;
  if (name == "mock") return ProviderKind::Mock;
  if (name == "extractive") return ProviderKind::Extractive;
  if (name == "openai") return ProviderKind::OpenAI;
  return std::nullopt;
}

namespace {

std::string_view provider_name(ProviderKind kind) {
  switch (kind) {
    case ProviderKind::Auto: return "auto";
    case ProviderKind::Mock: return "mock";
    case ProviderKind::Extractive: return "extractive";
    case ProviderKind::OpenAI: return "openai";
  }
  return "auto";
}

ProviderKind resolve(const ServiceConfig& config) {
  if (config.provider != ProviderKind::Auto) return config.provider;
  return config.openai_api_key.empty() ? ProviderKind::Mock : ProviderKind::OpenAI;
}

int parse_port(const std::string& text) {
  try {
    std::size_t used = 0;
    const int port = std::stoi(text, &used);
    if (used == text.size()) return port;
  } catch (const std::exception&) {
  }
  throw Error(ErrorCode::InvalidArgument, "invalid port '" + text + "'");
}

std::string env_or(const char* name, std::string fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file_atomic(const fs::path& path, const std::string& content) {
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << content;
    if (!out.flush()) throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
  }
  fs::rename(tmp, path);
}

const std::map<EmbeddingModelClass, std::string>& openai_embedding_defaults() {
  static const std::map<EmbeddingModelClass, std::string> ids{
      {EmbeddingModelClass::Ada, "text-embedding-ada-002"},
      {EmbeddingModelClass::Babbage, "text-similarity-babbage-001"},
      {EmbeddingModelClass::Curie, "text-similarity-curie-001"},
      {EmbeddingModelClass::Davinci, "text-similarity-davinci-001"}};
  return ids;
}

const std::map<ChatModelClass, std::string>& openai_chat_defaults() {
  static const std::map<ChatModelClass, std::string> ids{{ChatModelClass::Base, "gpt-3.5-turbo"},
                                                         {ChatModelClass::Extended, "gpt-3.5-turbo-16k"},
                                                         {ChatModelClass::Advanced, "gpt-4"},
                                                         {ChatModelClass::ExaminerLarge, "gpt-4-turbo"}};
  return ids;
}

}  // namespace

ServiceConfig ServiceConfig::from_environment() {
  ServiceConfig c;
  if (const char* port = std::getenv("PORT"); port && *port) c.listen_port = parse_port(port);
  c.parser_url = env_or("PARSER_URL", c.parser_url);
  c.openai_api_key = env_or("OPENAI_API_KEY", c.openai_api_key);
  c.openai_base_url = env_or("OPENAI_BASE_URL", c.openai_base_url);
  c.data_dir = env_or("PAPERCHAT_DATA_DIR", c.data_dir.string());
  return c;
}

ServiceConfig ServiceConfig::from_json(const nlohmann::json& j, ServiceConfig c) {
  if (!j.is_object()) throw Error(ErrorCode::SchemaError, "config must be a JSON object");
  try {
    if (j.contains("port")) c.listen_port = j["port"].get<int>();
    if (j.contains("data_dir")) c.data_dir = j["data_dir"].get<std::string>();
    if (j.contains("parser_url")) c.parser_url = j["parser_url"].get<std::string>();
    if (j.contains("default_tier")) {
      auto t = parse_tier(j["default_tier"].get<std::string>());
      if (!t) throw Error(ErrorCode::SchemaError, "unknown default_tier");
      c.default_tier = *t;
    }
    if (j.contains("provider")) {
      auto p = parse_provider_kind(j["provider"].get<std::string>());
      if (!p) throw Error(ErrorCode::SchemaError, "unknown provider");
      c.provider = *p;
    }
    if (j.contains("openai_base_url")) c.openai_base_url = j["openai_base_url"].get<std::string>();
    if (j.contains("embedding_models")) {
      for (const auto& [name, id] : j["embedding_models"].items()) {
        auto m = parse_embedding_model(name);
        if (!m) throw Error(ErrorCode::SchemaError, "unknown embedding model class " + name);
        c.embedding_model_ids[*m] = id.get<std::string>();
      }
    }
    if (j.contains("chat_models")) {
      for (const auto& [name, id] : j["chat_models"].items()) {
        auto m = parse_chat_model(name);
        if (!m) throw Error(ErrorCode::SchemaError, "unknown chat model class " + name);
        c.chat_model_ids[*m] = id.get<std::string>();
      }
    }
    if (j.contains("advanced_window")) c.advanced_window = j["advanced_window"].get<std::size_t>();
    if (j.contains("examiner_window")) c.examiner_window = j["examiner_window"].get<std::size_t>();
    if (j.contains("refine_parallelism")) c.refine_parallelism = j["refine_parallelism"].get<std::size_t>();
    if (j.contains("retry")) {
      c.retry.max_attempts = j["retry"].value("max_attempts", c.retry.max_attempts);
      c.retry.initial_backoff =
          std::chrono::milliseconds(j["retry"].value("initial_backoff_ms", c.retry.initial_backoff.count()));
    }
    if (j.contains("ui_dir")) c.ui_dir = j["ui_dir"].get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::SchemaError, std::string("config: ") + e.what());
  }
  return c;
}

void ServiceConfig::validate() const {
  if (listen_port < 1 || listen_port > 65535) {
    throw Error(ErrorCode::InvalidArgument, "port must be in 1..65535, got " + std::to_string(listen_port));
  }
  if (data_dir.empty()) throw Error(ErrorCode::InvalidArgument, "data_dir must not be empty");
  if (retry.max_attempts < 1) throw Error(ErrorCode::InvalidArgument, "retry.max_attempts must be >= 1");
}

ProviderSet make_providers(const ServiceConfig& config) {
  ProviderSet set;
  set.embeddings = std::make_shared<EmbeddingEngine>();
  set.gateway = std::make_shared<LlmGateway>();
  set.summarizer = std::make_shared<SentenceRankSummarizer>();

  set.embeddings->set_cache(std::make_shared<EmbeddingCache>(config.data_dir / "embeddings"));
  set.embeddings->set_retry(config.retry.max_attempts, config.retry.initial_backoff);
  set.gateway->set_retry_policy(config.retry);

  auto local = std::make_shared<LocalHashProvider>();
  set.embeddings->bind(EmbeddingModelClass::LocalHash, {local, "local-hash-256"});
  auto mock = std::make_shared<MockChatBackend>();
  set.gateway->bind(ChatModelClass::Mock, {mock, "mock", std::nullopt, 4});

  auto window_for = [&](ChatModelClass m) -> std::optional<std::size_t> {
    if (m == ChatModelClass::Advanced) return config.advanced_window;
    if (m == ChatModelClass::ExaminerLarge) return config.examiner_window;
    return std::nullopt;
  };
  auto pick = [](const auto& overrides, auto key, std::string fallback) {
    auto it = overrides.find(key);
    return it == overrides.end() ? fallback : it->second;
  };
  const ChatModelClass chat_classes[] = {ChatModelClass::Base, ChatModelClass::Extended, ChatModelClass::Advanced,
                                         ChatModelClass::ExaminerLarge};

  switch (resolve(config)) {
    case ProviderKind::OpenAI: {
      auto emb = std::make_shared<OpenAIEmbeddingProvider>(config.openai_api_key, config.openai_base_url);
      for (const auto& [cls, id] : openai_embedding_defaults()) {
        set.embeddings->bind(cls, {emb, pick(config.embedding_model_ids, cls, id)});
      }
      auto chat = std::make_shared<OpenAIChatBackend>(config.openai_api_key, config.openai_base_url);
      for (auto cls : chat_classes) {
        set.gateway->bind(cls, {chat, pick(config.chat_model_ids, cls, openai_chat_defaults().at(cls)),
                                window_for(cls), config.refine_parallelism});
      }
      break;
    }
    case ProviderKind::Mock:
    case ProviderKind::Extractive:
    case ProviderKind::Auto: {
      for (auto cls : {EmbeddingModelClass::Ada, EmbeddingModelClass::Babbage, EmbeddingModelClass::Curie}) {
        set.embeddings->bind(cls, {local, pick(config.embedding_model_ids, cls, "local-hash-256")});
      }
      set.embeddings->bind(EmbeddingModelClass::Davinci,
                           {local, pick(config.embedding_model_ids, EmbeddingModelClass::Davinci, "local-hash-512")});
      std::shared_ptr<ChatBackend> backend = mock;
      if (resolve(config) == ProviderKind::Extractive) {
        backend = std::make_shared<MockChatBackend>(
            [](const ChatRequest& r) { return extractive_reply(r); });
      }
      for (auto cls : chat_classes) {
        const auto id = std::string(resolve(config) == ProviderKind::Extractive ? "extractive-" : "mock-") +
                        std::string(to_string(cls));
        // The examiner always gets the plain mock: an evidence echo is not a score.
        set.gateway->bind(cls, {cls == ChatModelClass::ExaminerLarge ? std::shared_ptr<ChatBackend>(mock) : backend,
                                pick(config.chat_model_ids, cls, id), window_for(cls), config.refine_parallelism});
      }
      break;
    }
  }
  return set;
}

nlohmann::json to_json(const ApiMessage& m) {
  static constexpr std::string_view roles[] = {"user", "assistant", "system"};
  return {{"conversation_id", m.conversation_id},
          {"role", roles[static_cast<int>(m.role)]},
          {"text", m.text},
          {"tier", to_string(m.tier)},
          {"token_cost", m.token_cost},
          {"citations", m.citations}};
}

nlohmann::json to_json(const KeyReferenceResult& r) {
  nlohmann::json matched = nlohmann::json::array();
  for (const auto& m : r.matched) {
    matched.push_back({{"reference",
                        {{"title", m.reference.title},
                         {"author", m.reference.author},
                         {"year", m.reference.year},
                         {"journal", m.reference.journal}}},
                       {"reference_index", m.reference_index},
                       {"confidence", to_string(m.confidence)},
                       {"rationale", m.rationale}});
  }
  return {{"matched", std::move(matched)}, {"raw_model_output", r.raw_model_output}, {"token_cost", r.token_cost}};
}

std::vector<ApiMessage> messages_from_memory(const ConversationMemory& memory) {
  std::vector<ApiMessage> out;
  for (const auto& e : memory.entries()) {
    out.push_back({memory.conversation_id(), MessageRole::User, e.query, e.tier, 0, {}});
    out.push_back(
        {memory.conversation_id(), MessageRole::Assistant, e.answer, e.tier, e.token_cost, extract_citations(e.answer)});
  }
  return out;
}

Service::Service(ServiceConfig config) : Service(config, make_providers(config)) {}

Service::Service(ServiceConfig config, ProviderSet providers)
    : config_(std::move(config)), providers_(std::move(providers)) {
  config_.validate();
  OrchestratorOptions options;
  options.refine_parallelism = config_.refine_parallelism;
  orchestrator_ = std::make_unique<Orchestrator>(*providers_.embeddings, *providers_.gateway,
                                                 providers_.summarizer.get(), options);
  fs::create_directories(config_.data_dir / "documents");
  fs::create_directories(config_.data_dir / "conversations");
  replay_state();
}

void Service::replay_state() {
  std::vector<fs::path> docs, convs;
  for (const auto& e : fs::directory_iterator(config_.data_dir / "documents")) {
    if (e.path().extension() == ".json") docs.push_back(e.path());
  }
  for (const auto& e : fs::directory_iterator(config_.data_dir / "conversations")) {
    if (e.path().extension() == ".jsonl") convs.push_back(e.path());
  }
  std::sort(docs.begin(), docs.end());
  std::sort(convs.begin(), convs.end());

  for (const auto& path : docs) {
    Paper paper = ingest_parsed_paper(std::string_view(read_file(path)));
    const auto id = document_id(paper);
    if (id != path.stem().string()) spdlog::warn("document blob {} hashes to {}", path.string(), id);
    documents_[id] = std::make_shared<const DocumentIndex>(std::move(paper), id);
  }
  for (const auto& path : convs) {
    auto slot = std::make_shared<ConversationSlot>();
    slot->memory = ConversationLog::replay(path);
    conversations_[slot->memory.conversation_id()] = std::move(slot);
  }
  if (!docs.empty() || !convs.empty()) {
    spdlog::info("restored {} document(s) and {} conversation(s)", documents_.size(), conversations_.size());
  }
}

IngestResult Service::register_document(Paper paper) {
  const auto id = document_id(paper);
  std::unique_lock lock(mutex_);
  if (auto it = documents_.find(id); it != documents_.end()) return {id, it->second->paper().title, false};
  write_file_atomic(config_.data_dir / "documents" / (id + ".json"), to_parse_json(paper).dump(2));
  auto title = paper.title;
  documents_[id] = std::make_shared<const DocumentIndex>(std::move(paper), id);
  return {id, std::move(title), true};
}

IngestResult Service::ingest_parse(const nlohmann::json& raw) { return register_document(ingest_parsed_paper(raw)); }

namespace {

std::string parse_response_body(const httplib::Result& res, const std::string& parser_url) {
  if (!res) {
    throw Error(ErrorCode::ParserUnavailable,
                "parser at " + parser_url + " unreachable: " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw Error(ErrorCode::ParserUnavailable,
                "parser returned HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 200));
  }
  return res->body;
}

}  // namespace

IngestResult Service::ingest_url(const std::string& url) {
  if (config_.parser_url.empty()) throw Error(ErrorCode::ParserUnavailable, "PARSER_URL is not configured");
  httplib::Client client(config_.parser_url);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(300, 0);
  auto res = client.Post("/parse", nlohmann::json{{"url", url}}.dump(), "application/json");
  return ingest_parse(nlohmann::json::parse(parse_response_body(res, config_.parser_url), nullptr, false));
}

IngestResult Service::ingest_file(const fs::path& path) {
  const std::string content = read_file(path);
  if (path.extension() == ".json") return register_document(ingest_parsed_paper(std::string_view(content)));
  if (config_.parser_url.empty()) throw Error(ErrorCode::ParserUnavailable, "PARSER_URL is not configured");
  httplib::Client client(config_.parser_url);
  client.set_connection_timeout(5, 0);
  client.set_read_timeout(300, 0);
  httplib::MultipartFormDataItems items{{"input", content, path.filename().string(), "application/pdf"}};
  auto res = client.Post("/parse", items);
  return ingest_parse(nlohmann::json::parse(parse_response_body(res, config_.parser_url), nullptr, false));
}

std::shared_ptr<const DocumentIndex> Service::document(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = documents_.find(id);
  if (it == documents_.end()) throw Error(ErrorCode::NotFound, "unknown document " + id);
  return it->second;
}

std::vector<std::string> Service::document_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : documents_) ids.push_back(id);
  return ids;
}

fs::path Service::conversation_path(const std::string& id) const {
  return config_.data_dir / "conversations" / (id + ".jsonl");
}

std::string Service::create_conversation(const std::string& doc_id) {
  document(doc_id);
  std::unique_lock lock(mutex_);
  std::string id;
  for (std::size_t ordinal = 0;; ++ordinal) {
    id = "c-" + sha256_hex(doc_id + ":" + std::to_string(ordinal)).substr(0, 12);
    if (!conversations_.contains(id)) break;
  }
  auto slot = std::make_shared<ConversationSlot>();
  slot->memory = ConversationMemory(id, doc_id, config_.default_tier);
  ConversationLog(conversation_path(id)).record_created(slot->memory);
  conversations_[id] = std::move(slot);
  return id;
}

std::vector<std::string> Service::conversation_ids() const {
  std::shared_lock lock(mutex_);
  std::vector<std::string> ids;
  for (const auto& [id, _] : conversations_) ids.push_back(id);
  return ids;
}

std::shared_ptr<Service::ConversationSlot> Service::slot(const std::string& id) const {
  std::shared_lock lock(mutex_);
  auto it = conversations_.find(id);
  if (it == conversations_.end()) throw Error(ErrorCode::NotFound, "unknown conversation " + id);
  return it->second;
}

ConversationMemory Service::memory(const std::string& id) const {
  auto s = slot(id);
  std::lock_guard lock(s->mutex);
  return s->memory;
}

std::vector<ApiMessage> Service::messages(const std::string& id) const { return messages_from_memory(memory(id)); }

ApiMessage Service::answer_locked(ConversationSlot& s, const std::string& query, PipelineTrace* trace) {
  std::shared_ptr<const DocumentIndex> doc;
  {
    std::shared_lock lock(mutex_);
    auto it = documents_.find(s.memory.document_id());
    if (it != documents_.end()) doc = it->second;
  }
  const auto answer = orchestrator_->answer(query, s.memory, doc.get(), trace);
  ConversationLog(conversation_path(s.memory.conversation_id())).record_entry(s.memory.entries().back());
  return {s.memory.conversation_id(), MessageRole::Assistant, answer.text, answer.tier_used, answer.token_cost,
          answer.citations};
}

ApiMessage Service::post_message(const std::string& id, const std::string& query, PipelineTrace* trace) {
  if (query.empty()) throw Error(ErrorCode::InvalidArgument, "query must not be empty");
  auto s = slot(id);
  std::lock_guard lock(s->mutex);
  return answer_locked(*s, query, trace);
}

HelpResult Service::help(const std::string& id) {
  auto s = slot(id);
  std::lock_guard lock(s->mutex);
  if (s->memory.entries().empty()) throw Error(ErrorCode::Conflict, "ask a question before requesting help");
  const auto result = escalate(s->memory);
  if (result.changed) ConversationLog(conversation_path(id)).record_escalation(result.new_tier);
  const std::string latest = s->memory.entries().back().query;
  return {result.new_tier, result.changed, answer_locked(*s, latest, nullptr)};
}

KeyReferenceResult Service::key_references(const std::string& doc_id, const std::string& conversation_id) {
  const auto doc = document(doc_id);
  if (conversation_id.empty()) {
    return find_key_references(ConversationMemory({}, doc_id, config_.default_tier), doc->paper(),
                               *providers_.gateway);
  }
  auto s = slot(conversation_id);
  std::lock_guard lock(s->mutex);
  if (s->memory.document_id() != doc_id) {
    throw Error(ErrorCode::InvalidArgument, "conversation " + conversation_id + " is bound to another document");
  }
  return find_key_references(s->memory, doc->paper(), *providers_.gateway);
}

nlohmann::json Service::health() const {
  nlohmann::json parser{{"url", config_.parser_url}, {"reachable", false}};
  if (!config_.parser_url.empty()) {
    httplib::Client client(config_.parser_url);
    client.set_connection_timeout(1, 0);
    client.set_read_timeout(2, 0);
    parser["reachable"] = static_cast<bool>(client.Get("/"));
  }
  std::shared_lock lock(mutex_);
  return {{"status", "ok"},
          {"provider", provider_name(resolve(config_))},
          {"documents", documents_.size()},
          {"conversations", conversations_.size()},
          {"parser", std::move(parser)}};
}

}  // namespace paperchat
