#pragma once

#include <memory>
#include <string>

#include "paperchat/errors.hpp"
#include "paperchat/service.hpp"

namespace httplib {
class Server;
}

namespace paperchat {

int http_status(ErrorCode code);

/// HTTP + server-sent-events front end over a Service.
///
///   POST /documents                          {"url"} | {"parse"}     -> 201 {document_id, title}
///   POST /conversations                      {"document_id"}         -> 201 {conversation_id, tier}
///   GET  /conversations/{id}                                          -> {memory, messages}
///   POST /conversations/{id}/messages        {"query"}               -> ApiMessage (or SSE)
///   POST /conversations/{id}/help                                     -> {tier, changed, reanswer}
///   GET  /documents/{id}/key-references?conversation={cid}            -> KeyReferenceResult
///   GET  /health
///
/// Errors are JSON bodies {"error": code, "message": text}.
class HttpServer {
 public:
  explicit HttpServer(Service& service);
  ~HttpServer();

  /// Binds to `port` (0 picks a free port) and returns the bound port, or -1.
  int bind(const std::string& host, int port);
  /// Blocks serving requests until stop().
  bool listen_after_bind();
  void stop();

 private:
  void install_routes();

  Service& service_;
  std::unique_ptr<httplib::Server> server_;
};

}  // namespace paperchat
