#include "paperchat/http_server.hpp"

#include <spdlog/spdlog.h>

#include "httplib.h"

namespace paperchat {

int http_status(ErrorCode code) {
  switch (code) {
    case ErrorCode::SchemaError:
    case ErrorCode::InvalidArgument:
    case ErrorCode::PreconditionViolation:
    case ErrorCode::EmptyText:
      return 400;
    case ErrorCode::NotFound:
    case ErrorCode::DocumentNotIngested:
      return 404;
    case ErrorCode::Conflict:
      return 409;
    case ErrorCode::ContextOverflow:
      return 413;
    case ErrorCode::EmptyDocument:
    case ErrorCode::NoReferences:
    case ErrorCode::EmptyEvidence:
      return 422;
    case ErrorCode::ParserUnavailable:
      return 502;
    case ErrorCode::ProviderError:
    case ErrorCode::AuthError:
    case ErrorCode::SummarizerUnavailable:
      return 503;
    default:
      return 500;
  }
}

namespace {

using nlohmann::json;

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

json error_body(std::string_view code, const std::string& message) {
  return {{"error", code}, {"message", message}};
}

template <class Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    send_json(res, http_status(e.code()), error_body(to_string(e.code()), e.what()));
  } catch (const std::exception& e) {
    spdlog::error("request failed: {}", e.what());
    send_json(res, 500, error_body("InternalError", e.what()));
  }
}

json body_of(const httplib::Request& req) {
  auto j = json::parse(req.body, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw Error(ErrorCode::SchemaError, "request body must be a JSON object");
  return j;
}

std::string sse_event(std::string_view event, const json& data) {
  return "event: " + std::string(event) + "\ndata: " + data.dump() + "\n\n";
}

bool wants_stream(const httplib::Request& req) {
  return req.get_header_value("Accept").find("text/event-stream") != std::string::npos ||
         req.get_param_value("stream") == "1";
}

// Answers are produced whole; the stream replays them word by word so the
// UI can render incrementally.
std::string answer_stream(const ApiMessage& message) {
  std::string out;
  const std::string& text = message.text;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find(' ', start);
    end = end == std::string::npos ? text.size() : end + 1;
    out += sse_event("token", {{"text", text.substr(start, end - start)}});
    start = end;
  }
  for (auto label : message.citations) out += sse_event("citation", {{"label", label}});
  out += sse_event("done", to_json(message));
  return out;
}

}  // namespace

HttpServer::HttpServer(Service& service) : service_(service), server_(std::make_unique<httplib::Server>()) {
  install_routes();
}

HttpServer::~HttpServer() = default;

void HttpServer::install_routes() {
  auto& s = *server_;
  Service& svc = service_;

  s.Get("/health", [&svc](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, svc.health()); });
  });

  s.Post("/documents", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = body_of(req);
      IngestResult r;
      if (body.contains("parse")) {
        r = svc.ingest_parse(body["parse"]);
      } else if (body.contains("url") && body["url"].is_string()) {
        r = svc.ingest_url(body["url"].get<std::string>());
      } else {
        throw Error(ErrorCode::SchemaError, "expected \"url\" or \"parse\"");
      }
      send_json(res, r.created ? 201 : 200, {{"document_id", r.document_id}, {"title", r.title}});
    });
  });

  s.Post("/conversations", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto body = body_of(req);
      if (!body.contains("document_id") || !body["document_id"].is_string()) {
        throw Error(ErrorCode::SchemaError, "expected \"document_id\"");
      }
      const auto id = svc.create_conversation(body["document_id"].get<std::string>());
      send_json(res, 201, {{"conversation_id", id}, {"tier", to_string(svc.memory(id).current_tier())}});
    });
  });

  s.Get(R"(/conversations/([^/]+))", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto memory = svc.memory(req.matches[1]);
      json messages = json::array();
      for (const auto& m : messages_from_memory(memory)) messages.push_back(to_json(m));
      json entries = json::array();
      for (const auto& e : memory.entries()) entries.push_back(to_json(e));
      send_json(res, 200,
                {{"conversation_id", memory.conversation_id()},
                 {"document_id", memory.document_id()},
                 {"tier", to_string(memory.current_tier())},
                 {"entries", std::move(entries)},
                 {"messages", std::move(messages)}});
    });
  });

  s.Post(R"(/conversations/([^/]+)/messages)", [&svc](const httplib::Request& req, httplib::Response& res) {
    const bool stream = wants_stream(req);
    try {
      const auto body = body_of(req);
      if (!body.contains("query") || !body["query"].is_string()) {
        throw Error(ErrorCode::SchemaError, "expected \"query\"");
      }
      const auto message = svc.post_message(req.matches[1], body["query"].get<std::string>());
      if (stream) {
        res.set_content(answer_stream(message), "text/event-stream");
      } else {
        send_json(res, 200, to_json(message));
      }
    } catch (const Error& e) {
      res.status = http_status(e.code());
      const auto err = error_body(to_string(e.code()), e.what());
      if (stream) {
        res.set_content(sse_event("error", err), "text/event-stream");
      } else {
        res.set_content(err.dump(), "application/json");
      }
    } catch (const std::exception& e) {
      send_json(res, 500, error_body("InternalError", e.what()));
    }
  });

  s.Post(R"(/conversations/([^/]+)/help)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      const auto r = svc.help(req.matches[1]);
      send_json(res, 200, {{"tier", to_string(r.tier)}, {"changed", r.changed}, {"reanswer", to_json(r.reanswer)}});
    });
  });

  s.Get(R"(/documents/([^/]+)/key-references)", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      send_json(res, 200, to_json(svc.key_references(req.matches[1], req.get_param_value("conversation"))));
    });
  });

  if (svc.config().ui_dir && !s.set_mount_point("/", svc.config().ui_dir->string())) {
    spdlog::warn("ui directory {} not found; serving API only", svc.config().ui_dir->string());
  }
}

int HttpServer::bind(const std::string& host, int port) {
  if (port == 0) return server_->bind_to_any_port(host);
  return server_->bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen_after_bind() { return server_->listen_after_bind(); }

void HttpServer::stop() { server_->stop(); }

}  // namespace paperchat
