#pragma once

#include <memory>
#include <string>

#include "yle/session.hpp"

namespace yle::svc {

// Routes of the yle-svc/1 HTTP API:
//   GET  /v1/protocol
//   POST /v1/sessions                       create (SessionOptions json)
//   POST /v1/sessions/{id}/join             {"seat": s} -> {"token"}
//   GET  /v1/sessions/{id}/view
//   GET  /v1/sessions/{id}/targets?card=k
//   POST /v1/sessions/{id}/actions          {"action", "version"?}
//   GET  /v1/sessions/{id}/record           finished games only
//   GET  /v1/sessions/{id}/push             WebSocket upgrade
// Seat tokens travel as "Authorization: Bearer <token>" or "?token=".
struct HttpReply {
  int status = 200;
  Json body;
};

HttpReply route(SessionManager& sessions, const std::string& method, const std::string& target,
                const std::string& body, const std::string& token);

int status_for(const std::string& reason);

struct ServerOptions {
  std::string address = "127.0.0.1";
  unsigned short port = 8080;  // 0 picks a free port
};

// Thread-per-connection HTTP and WebSocket server.
class Server {
 public:
  Server(SessionManager& sessions, ServerOptions options);
  ~Server();
  Server(const Server&) = delete;
  Server& operator=(const Server&) = delete;

  unsigned short port() const;
  // Blocks until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace yle::svc
