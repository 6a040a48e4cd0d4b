// Command-line front end: ingest, ask, help, keyrefs, ablate, serve.

#include <csignal>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "json.hpp"
#include "paperchat/errors.hpp"
#include "paperchat/eval.hpp"
#include "paperchat/http_server.hpp"
#include "paperchat/service.hpp"

using namespace paperchat;
using nlohmann::json;

namespace {

struct GlobalOptions {
  std::string data_dir;
  std::string provider;
  std::string config_file;
  bool verbose = false;
  bool json_output = false;
};

ServiceConfig load_config(const GlobalOptions& g) {
  ServiceConfig config = ServiceConfig::from_environment();
  if (!g.config_file.empty()) {
    std::ifstream in(g.config_file);
    if (!in) throw Error(ErrorCode::IoError, "cannot read config " + g.config_file);
    auto j = json::parse(in, nullptr, false);
    if (j.is_discarded()) throw Error(ErrorCode::SchemaError, "config " + g.config_file + " is not valid JSON");
    config = ServiceConfig::from_json(j, config);
  }
  if (!g.data_dir.empty()) config.data_dir = g.data_dir;
  if (!g.provider.empty()) {
    auto kind = parse_provider_kind(g.provider);
    if (!kind) throw Error(ErrorCode::InvalidArgument, "unknown provider '" + g.provider + "'");
    config.provider = *kind;
  }
  return config;
}

void print_message(const ApiMessage& m, bool as_json) {
  if (as_json) {
    std::cout << to_json(m).dump() << '\n';
    return;
  }
  std::cout << m.text << "\n\n"
            << "tier: " << to_string(m.tier) << " | token cost : " << m.token_cost
            << " | conversation: " << m.conversation_id << '\n';
}

std::shared_ptr<const DocumentIndex> ablation_document(Service& service, const std::string& source_arg) {
  const std::string source = source_arg.empty() ? PAPERCHAT_DEFAULT_FIXTURE : source_arg;
  if (std::filesystem::exists(source)) {
    std::ifstream in(source, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    Paper paper = ingest_parsed_paper(std::string_view(buf.str()));
    auto id = document_id(paper);
    return std::make_shared<const DocumentIndex>(std::move(paper), std::move(id));
  }
  return service.document(source);
}

int serve(Service& service, int port) {
  // Block the shutdown signals everywhere and wait for them on one thread.
  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  HttpServer server(service);
  const int bound = server.bind("0.0.0.0", port);
  if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind port " + std::to_string(port));
  std::jthread waiter([&] {
    int sig = 0;
    sigwait(&signals, &sig);
    spdlog::info("signal {} received, draining", sig);
    server.stop();
  });
  spdlog::info("listening on http://localhost:{}", bound);
  std::cerr << "listening on http://localhost:" << bound << std::endl;
  server.listen_after_bind();
  waiter.detach();
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tiered question answering over parsed scientific papers"};
  app.require_subcommand(1);
  GlobalOptions g;
  app.add_option("--data-dir", g.data_dir, "State directory (default $PAPERCHAT_DATA_DIR or ./paperchat-data)");
  app.add_option("--provider", g.provider, "auto | mock | extractive | openai");
  app.add_option("--config", g.config_file, "JSON service configuration");
  app.add_flag("-v,--verbose", g.verbose, "Log progress to stderr");
  app.add_flag("--json", g.json_output, "Machine-readable output");

  auto* ingest = app.add_subcommand("ingest", "Ingest a parse JSON file, a PDF, or a PDF URL");
  std::string source;
  ingest->add_option("source", source, "path or URL")->required();

  auto* ask = app.add_subcommand("ask", "Ask a question about an ingested document");
  std::string doc_id, query, conversation, tier_name;
  ask->add_option("document", doc_id)->required();
  ask->add_option("query", query)->required();
  ask->add_option("--tier", tier_name, "Starting tier for a new conversation: entry | intermediate | extreme");
  ask->add_option("--conversation", conversation, "Continue an existing conversation");

  auto* help = app.add_subcommand("help", "Escalate a conversation and re-answer its latest question");
  help->add_option("conversation", conversation)->required();

  auto* keyrefs = app.add_subcommand("keyrefs", "Find the key references of a document");
  keyrefs->add_option("document", doc_id)->required();
  keyrefs->add_option("conversation", conversation, "Conversation whose summaries are used");

  auto* ablate = app.add_subcommand("ablate", "Run the retrieval ablation grid over the fixture questions");
  std::string grid_path = "table2", judge_name = "deterministic", ablate_doc;
  bool records = false;
  ablate->add_option("--grid", grid_path, "Grid JSON file, or 'table2'");
  ablate->add_option("--judge", judge_name, "examiner | deterministic")
      ->check(CLI::IsMember({"examiner", "deterministic"}));
  ablate->add_option("--document", ablate_doc, "Parse JSON path or ingested document id (default: bundled fixture)");
  ablate->add_flag("--records", records, "Emit one JSON record per cell instead of the table");

  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  int port = 0;
  serve_cmd->add_option("--port", port, "Listen port (default $PORT or 7860)");

  CLI11_PARSE(app, argc, argv);

  auto logger = spdlog::stderr_color_mt("paperchat");
  spdlog::set_default_logger(logger);
  spdlog::set_level(g.verbose ? spdlog::level::info : spdlog::level::warn);

  try {
    ServiceConfig config = load_config(g);
    if (*serve_cmd && port != 0) config.listen_port = port;
    if (!tier_name.empty()) {
      auto tier = parse_tier(tier_name);
      if (!tier) throw Error(ErrorCode::InvalidArgument, "unknown tier '" + tier_name + "'");
      config.default_tier = *tier;
    }
    Service service(config);

    if (*ingest) {
      const bool is_url = source.starts_with("http://") || source.starts_with("https://");
      const auto r = is_url ? service.ingest_url(source) : service.ingest_file(source);
      std::cout << json{{"document_id", r.document_id}, {"title", r.title}, {"created", r.created}}.dump() << '\n';
    } else if (*ask) {
      if (conversation.empty()) {
        conversation = service.create_conversation(doc_id);
      } else if (service.memory(conversation).document_id() != doc_id) {
        throw Error(ErrorCode::InvalidArgument, "conversation " + conversation + " belongs to another document");
      }
      print_message(service.post_message(conversation, query), g.json_output);
    } else if (*help) {
      const auto r = service.help(conversation);
      if (g.json_output) {
        std::cout << json{{"tier", to_string(r.tier)}, {"changed", r.changed}, {"reanswer", to_json(r.reanswer)}}.dump()
                  << '\n';
      } else {
        std::cout << (r.changed ? "escalated to " : "already at ") << to_string(r.tier) << "\n\n";
        print_message(r.reanswer, false);
      }
    } else if (*keyrefs) {
      const auto r = service.key_references(doc_id, conversation);
      if (g.json_output) {
        std::cout << to_json(r).dump() << '\n';
      } else {
        for (const auto& m : r.matched) {
          std::cout << "[" << to_string(m.confidence) << "] " << m.reference.title;
          if (!m.reference.author.empty()) std::cout << ", " << m.reference.author;
          if (!m.reference.year.empty()) std::cout << ", " << m.reference.year;
          std::cout << '\n';
        }
        if (r.matched.empty()) std::cout << "no reference titles found in the model output\n";
        std::cout << "token cost : " << r.token_cost << '\n';
      }
    } else if (*ablate) {
      const auto grid = load_grid(grid_path);
      const auto doc = ablation_document(service, ablate_doc);
      std::unique_ptr<Judge> judge;
      if (judge_name == "examiner") {
        judge = std::make_unique<ExaminerJudge>(*service.providers().gateway, full_text(doc->paper()));
      } else {
        judge = std::make_unique<DeterministicJudge>();
      }
      const auto matrix = run_ablation(grid, fixture_questions(), *judge, *doc, service.orchestrator());
      std::cout << (records ? render_records(matrix) : render_table(matrix));
    } else if (*serve_cmd) {
      return serve(service, config.listen_port);
    }
  } catch (const Error& e) {
    std::cerr << json{{"error", to_string(e.code())}, {"message", e.what()}}.dump() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << json{{"error", "InternalError"}, {"message", e.what()}}.dump() << '\n';
    return 3;
  }
  return 0;
}
