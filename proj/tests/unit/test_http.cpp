#include <filesystem>
#include <thread>

#include "doctest.h"
#include "httplib.h"
#include "oracle.hpp"
#include "paperchat/http_server.hpp"

using namespace paperchat;
using nlohmann::json;

namespace {
// Serves the bundled fixture as the output of a structure parser.
class FakeParser {
 public:
  FakeParser() {
    server_.Post("/parse", [](const httplib::Request& req, httplib::Response& res) {
      const bool ok = req.has_file("input") || json::parse(req.body, nullptr, false).contains("url");
      if (!ok) {
        res.status = 400;
        return;
      }
      res.set_content(testkit::read_text(testkit::fixture_path("lima_parse.json")), "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }
  ~FakeParser() {
    server_.stop();
    thread_.join();
  }
  std::string url() const { return "http://127.0.0.1:" + std::to_string(port_); }

 private:
  httplib::Server server_;
  int port_ = 0;
  std::thread thread_;
};

struct Running {
  explicit Running(ServiceConfig cfg) : service(std::move(cfg)), http(service) {
    port = http.bind("127.0.0.1", 0);
    REQUIRE(port > 0);
    thread = std::thread([this] { http.listen_after_bind(); });
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    for (int i = 0; i < 200 && !client->Get("/health"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  }
  ~Running() {
    http.stop();
    thread.join();
  }
  Service service;
  HttpServer http;
  int port = 0;
  std::thread thread;
  std::unique_ptr<httplib::Client> client;
};

ServiceConfig config_for(const std::string& dir, const std::string& parser_url) {
  ServiceConfig c;
  c.data_dir = dir;
  c.provider = ProviderKind::Mock;
  c.parser_url = parser_url;
  c.retry = {1, std::chrono::milliseconds(0)};
  return c;
}

// Parses an SSE body into (event, data) pairs.
std::vector<std::pair<std::string, json>> events(const std::string& body) {
  std::vector<std::pair<std::string, json>> out;
  std::size_t pos = 0;
  while (pos < body.size()) {
    const auto end = body.find("\n\n", pos);
    if (end == std::string::npos) break;
    const auto block = body.substr(pos, end - pos);
    const auto nl = block.find('\n');
    out.emplace_back(block.substr(7, nl - 7), json::parse(block.substr(nl + 7)));
    pos = end + 2;
  }
  return out;
}
}  // namespace

TEST_CASE("status mapping") {
  CHECK(http_status(ErrorCode::SchemaError) == 400);
  CHECK(http_status(ErrorCode::NotFound) == 404);
  CHECK(http_status(ErrorCode::Conflict) == 409);
  CHECK(http_status(ErrorCode::ContextOverflow) == 413);
  CHECK(http_status(ErrorCode::NoReferences) == 422);
  CHECK(http_status(ErrorCode::ParserUnavailable) == 502);
  CHECK(http_status(ErrorCode::ProviderError) == 503);
  CHECK(http_status(ErrorCode::IoError) == 500);
}

TEST_CASE("HTTP API round trip") {
  FakeParser parser;
  const auto dir = testkit::temp_dir("http");
  Running srv(config_for(dir, parser.url()));
  auto& c = *srv.client;

  auto health = c.Get("/health");
  REQUIRE(health);
  CHECK(health->status == 200);
  CHECK(json::parse(health->body)["parser"]["reachable"] == true);

  auto r = c.Post("/documents", R"({"url":"https://example.org/lima.pdf"})", "application/json");
  REQUIRE(r);
  CHECK(r->status == 201);
  const auto doc = json::parse(r->body)["document_id"].get<std::string>();
  CHECK(doc == document_id(testkit::lima()));
  r = c.Post("/documents", json{{"parse", json::parse(testkit::read_text(testkit::fixture_path("lima_parse.json")))}}.dump(),
             "application/json");
  CHECK(r->status == 200);

  r = c.Post("/conversations", json{{"document_id", doc}}.dump(), "application/json");
  REQUIRE(r);
  CHECK(r->status == 201);
  const auto conv = json::parse(r->body)["conversation_id"].get<std::string>();
  CHECK(json::parse(r->body)["tier"] == "entry");

  r = c.Post("/conversations/" + conv + "/help", "", "application/json");
  CHECK(r->status == 409);
  CHECK(json::parse(r->body)["error"] == "Conflict");

  r = c.Post("/conversations/" + conv + "/messages", R"({"query":"what is the title of this paper ?"})",
             "application/json");
  REQUIRE(r);
  CHECK(r->status == 200);
  const auto msg = json::parse(r->body);
  CHECK(msg["role"] == "assistant");
  CHECK(msg["tier"] == "entry");
  CHECK(msg["token_cost"].get<std::size_t>() > 0);

  httplib::Headers sse{{"Accept", "text/event-stream"}};
  r = c.Post("/conversations/" + conv + "/messages", sse, R"({"query":"what data was used ?"})", "application/json");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(r->get_header_value("Content-Type").starts_with("text/event-stream"));
  const auto ev = events(r->body);
  REQUIRE(ev.size() >= 2);
  CHECK(ev.back().first == "done");
  std::string streamed;
  for (const auto& [name, data] : ev) {
    if (name == "token") streamed += data["text"].get<std::string>();
  }
  CHECK(streamed == ev.back().second["text"].get<std::string>());

  r = c.Post("/conversations/" + conv + "/help", "", "application/json");
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(json::parse(r->body)["tier"] == "intermediate");
  CHECK(json::parse(r->body)["reanswer"]["tier"] == "intermediate");

  r = c.Get("/conversations/" + conv);
  REQUIRE(r);
  const auto state = json::parse(r->body);
  CHECK(state["tier"] == "intermediate");
  CHECK(state["messages"].size() == 6);
  CHECK(state["entries"].size() == 3);

  r = c.Get("/documents/" + doc + "/key-references?conversation=" + conv);
  REQUIRE(r);
  CHECK(r->status == 200);
  CHECK(json::parse(r->body).contains("matched"));

  CHECK(c.Get("/conversations/c-nope")->status == 404);
  CHECK(c.Post("/conversations", "not json", "application/json")->status == 400);
  CHECK(c.Post("/conversations/" + conv + "/messages", R"({"query":""})", "application/json")->status == 400);
  r = c.Post("/conversations/c-nope/messages?stream=1", R"({"query":"q"})", "application/json");
  CHECK(r->status == 404);
  const auto err = events(r->body);
  REQUIRE(err.size() == 1);
  CHECK(err[0].first == "error");
  CHECK(err[0].second["error"] == "NotFound");
  std::filesystem::remove_all(dir);
}

TEST_CASE("file ingestion goes through the parser") {
  FakeParser parser;
  const auto dir = testkit::temp_dir("upload");
  Service svc(config_for(dir, parser.url()));
  const auto pdf = std::filesystem::path(dir) / "paper.pdf";
  { std::ofstream(pdf) << "%PDF-1.4 fake"; }
  CHECK(svc.ingest_file(pdf).document_id == document_id(testkit::lima()));
  CHECK(svc.ingest_file(testkit::fixture_path("lima_parse.json")).document_id == document_id(testkit::lima()));
  std::filesystem::remove_all(dir);
}

TEST_CASE("unreachable parser maps to 502") {
  const auto dir = testkit::temp_dir("noparser");
  Running srv(config_for(dir, "http://127.0.0.1:1"));
  auto r = srv.client->Post("/documents", R"({"url":"https://example.org/x.pdf"})", "application/json");
  REQUIRE(r);
  CHECK(r->status == 502);
  CHECK(json::parse(r->body)["error"] == "ParserUnavailable");
  CHECK(json::parse(srv.client->Get("/health")->body)["parser"]["reachable"] == false);
  std::filesystem::remove_all(dir);
}
