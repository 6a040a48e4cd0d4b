#include <fstream>

#include "paperchat/errors.hpp"
#include "paperchat/orchestrator.hpp"

namespace paperchat {

void ConversationLog::append(const nlohmann::json& event) const {
  if (path_.has_parent_path()) std::filesystem::create_directories(path_.parent_path());
  std::ofstream out(path_, std::ios::binary | std::ios::app);
  if (!out) throw Error(ErrorCode::IoError, "cannot append to " + path_.string());
  out << event.dump() << '\n';
  out.flush();
  if (!out) throw Error(ErrorCode::IoError, "write failed on " + path_.string());
}

void ConversationLog::record_created(const ConversationMemory& memory) const {
  append({{"event", "created"},
          {"conversation_id", memory.conversation_id()},
          {"document_id", memory.document_id()},
          {"tier", to_string(memory.current_tier())}});
}

void ConversationLog::record_entry(const MemoryEntry& entry) const {
  append({{"event", "entry"}, {"entry", to_json(entry)}});
}

void ConversationLog::record_escalation(AssistanceTier tier) const {
  append({{"event", "escalated"}, {"tier", to_string(tier)}});
}

ConversationMemory ConversationLog::replay(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::NotFound, "no conversation log at " + path.string());
  std::optional<ConversationMemory> memory;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    auto j = nlohmann::json::parse(line, nullptr, false);
    // A torn final line from an interrupted append is ignored.
    if (j.is_discarded()) {
      if (in.peek() == std::char_traits<char>::eof()) break;
      throw Error(ErrorCode::SchemaError, path.string() + ":" + std::to_string(lineno) + ": malformed event");
    }
    const auto event = j.value("event", std::string{});
    auto tier_of = [&](const nlohmann::json& v) {
      auto t = parse_tier(v.get<std::string>());
      if (!t) throw Error(ErrorCode::SchemaError, "unknown tier in conversation log");
      return *t;
    };
    if (event == "created") {
      memory.emplace(j.at("conversation_id").get<std::string>(), j.at("document_id").get<std::string>(),
                     tier_of(j.at("tier")));
    } else if (!memory) {
      throw Error(ErrorCode::SchemaError, "conversation log does not start with a created event");
    } else if (event == "entry") {
      memory->append(memory_entry_from_json(j.at("entry")));
    } else if (event == "escalated") {
      memory->raise_tier(tier_of(j.at("tier")));
    } else {
      throw Error(ErrorCode::SchemaError, "unknown conversation event '" + event + "'");
    }
  }
  if (!memory) throw Error(ErrorCode::SchemaError, "empty conversation log " + path.string());
  return *memory;
}

}  // namespace paperchat
