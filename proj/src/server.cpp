#include "yle/server.hpp"

#include <sys/socket.h>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <deque>
#include <functional>
#include <map>
#include <set>
#include <thread>

#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace yle::svc {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace http = beast::http;
namespace websocket = beast::websocket;
using tcp = asio::ip::tcp;

int status_for(const std::string& reason) {
  if (reason == "UNKNOWN_SESSION" || reason == "NOT_FOUND") return 404;
  if (reason == "BAD_TOKEN") return 403;
  if (reason == "MALFORMED" || reason == "BAD_SEAT") return 400;
  if (reason == "ILLEGAL_TARGET" || reason == "ILLEGAL_ACTION") return 422;
  if (reason == "POLICY_FAILED") return 502;
  return 409;
}

namespace {

struct Target {
  std::vector<std::string> path;
  std::map<std::string, std::string> query;
};

Target parse_target(const std::string& target) {
  Target t;
  const auto q = target.find('?');
  const std::string path = target.substr(0, q);
  std::size_t start = 0;
  while (start <= path.size()) {
    const auto slash = path.find('/', start);
    const std::string part = path.substr(start, slash == std::string::npos ? std::string::npos : slash - start);
    if (!part.empty()) t.path.push_back(part);
    if (slash == std::string::npos) break;
    start = slash + 1;
  }
  if (q != std::string::npos) {
    std::string rest = target.substr(q + 1);
    std::size_t pos = 0;
    while (pos <= rest.size()) {
      const auto amp = rest.find('&', pos);
      const std::string kv = rest.substr(pos, amp == std::string::npos ? std::string::npos : amp - pos);
      const auto eq = kv.find('=');
      if (!kv.empty()) t.query[kv.substr(0, eq)] = eq == std::string::npos ? "" : kv.substr(eq + 1);
      if (amp == std::string::npos) break;
      pos = amp + 1;
    }
  }
  return t;
}

Json parse_body(const std::string& body) {
  if (body.empty()) return Json::object();
  try {
    return Json::parse(body);
  } catch (const Json::exception& e) {
    throw Rejection("MALFORMED", e.what());
  }
}

}  // namespace

HttpReply route(SessionManager& sessions, const std::string& method, const std::string& target,
                const std::string& body, const std::string& header_token) {
  try {
    const Target t = parse_target(target);
    const auto& p = t.path;
    const std::string token = !header_token.empty() ? header_token
                              : t.query.count("token") ? t.query.at("token")
                                                       : std::string();
    if (p.size() < 2 || p[0] != "v1") throw Rejection("NOT_FOUND", "no route " + target);
    if (p.size() == 2 && p[1] == "protocol" && method == "GET") {
      return {200, Json{{"protocol", kServiceProtocol}, {"type", "protocol"}}};
    }
    if (p[1] != "sessions") throw Rejection("NOT_FOUND", "no route " + target);
    if (p.size() == 2 && method == "POST") return {201, sessions.create(parse_body(body))};
    if (p.size() != 4) throw Rejection("NOT_FOUND", "no route " + target);
    const std::shared_ptr<Session> session = sessions.get(p[2]);
    const std::string& verb = p[3];
    if (verb == "join" && method == "POST") {
      const Json j = parse_body(body);
      if (!j.contains("seat") || !j.at("seat").is_number_integer()) throw Rejection("MALFORMED", "expected {\"seat\": n}");
      const int seat = j.at("seat");
      const std::string tok = session->join(seat);
      return {200, Json{{"protocol", kServiceProtocol}, {"type", "joined"}, {"session", session->id()},
                        {"seat", seat}, {"token", tok}}};
    }
    if (verb == "view" && method == "GET") return {200, session->view(token)};
    if (verb == "targets" && method == "GET") {
      int card = -1;
      try {
        card = std::stoi(t.query.at("card"));
      } catch (const std::exception&) {
        throw Rejection("MALFORMED", "expected ?card=<index>");
      }
      return {200, session->legal_targets(token, card)};
    }
    if (verb == "actions" && method == "POST") return {200, session->submit(token, parse_body(body))};
    if (verb == "record" && method == "GET") {
      Json r = to_json(session->record());
      r["protocol"] = kServiceProtocol;
      return {200, r};
    }
    throw Rejection("NOT_FOUND", "no route " + method + " " + target);
  } catch (const Rejection& r) {
    return {status_for(r.code()), r.to_json()};
  }
}

// ---------------------------------------------------------------------------

struct Server::Impl {
  SessionManager& sessions;
  ServerOptions options;
  asio::io_context io;
  tcp::acceptor acceptor{io};
  std::atomic<bool> stopping{false};
  std::mutex mutex;
  std::condition_variable idle;
  std::set<int> open_fds;
  int active = 0;

  Impl(SessionManager& s, ServerOptions o) : sessions(s), options(std::move(o)) {
    const tcp::endpoint ep(asio::ip::make_address(options.address), options.port);
    acceptor.open(ep.protocol());
    acceptor.set_option(asio::socket_base::reuse_address(true));
    acceptor.bind(ep);
    acceptor.listen();
  }

  void accept() {
    acceptor.async_accept([this](beast::error_code ec, tcp::socket socket) {
      if (ec || stopping) return;
      {
        std::lock_guard lock(mutex);
        open_fds.insert(socket.native_handle());
        ++active;
      }
      std::thread([this, s = std::move(socket)]() mutable { serve(std::move(s)); }).detach();
      accept();
    });
  }

  void serve(tcp::socket socket) {
    const int fd = socket.native_handle();
    try {
      session_loop(socket);
    } catch (const std::exception&) {
      // Connection-level failures only end this connection.
    }
    beast::error_code ignored;
    std::lock_guard lock(mutex);
    // A push channel takes the socket over and closes it itself.
    if (socket.is_open()) {
      socket.shutdown(tcp::socket::shutdown_both, ignored);
      open_fds.erase(fd);
      socket.close(ignored);
    }
    --active;
    idle.notify_all();
  }

  static std::string bearer(const http::request<http::string_body>& req) {
    const auto it = req.find(http::field::authorization);
    if (it == req.end()) return {};
    const std::string value(it->value());
    return value.rfind("Bearer ", 0) == 0 ? value.substr(7) : std::string();
  }

  void session_loop(tcp::socket& socket) {
    beast::flat_buffer buffer;
    while (!stopping) {
      http::request<http::string_body> req;
      beast::error_code ec;
      http::read(socket, buffer, req, ec);
      if (ec) return;
      if (websocket::is_upgrade(req)) {
        push_loop(socket, std::move(req));
        return;
      }
      http::response<http::string_body> res;
      res.version(req.version());
      res.keep_alive(req.keep_alive());
      res.set(http::field::access_control_allow_origin, "*");
      if (req.method() == http::verb::options) {
        res.result(http::status::no_content);
        res.set(http::field::access_control_allow_methods, "GET, POST, OPTIONS");
        res.set(http::field::access_control_allow_headers, "Authorization, Content-Type");
      } else {
        const HttpReply reply = route(sessions, std::string(req.method_string()), std::string(req.target()),
                                      req.body(), bearer(req));
        res.result(static_cast<http::status>(reply.status));
        res.set(http::field::content_type, "application/json");
        res.body() = reply.body.dump();
      }
      res.prepare_payload();
      http::write(socket, res, ec);
      if (ec || !res.keep_alive()) return;
    }
  }

  void push_loop(tcp::socket& socket, http::request<http::string_body> req) {
    const Target t = parse_target(std::string(req.target()));
    std::shared_ptr<Session> session;
    std::string token = bearer(req);
    if (token.empty() && t.query.count("token")) token = t.query.at("token");
    Json first;
    try {
      if (t.path.size() != 4 || t.path[0] != "v1" || t.path[1] != "sessions" || t.path[3] != "push") {
        throw Rejection("NOT_FOUND", "no push route " + std::string(req.target()));
      }
      session = sessions.get(t.path[2]);
      first = session->view(token);
    } catch (const Rejection& r) {
      http::response<http::string_body> res{static_cast<http::status>(status_for(r.code())), req.version()};
      res.set(http::field::content_type, "application/json");
      res.body() = r.to_json().dump();
      res.prepare_payload();
      http::write(socket, res);
      return;
    }

    // The push channel runs on its own single-threaded context: one pending
    // read to notice closes, and a timer that drains the outbound queue.
    asio::io_context cio;
    const int fd = socket.native_handle();
    tcp::socket own(cio);
    const tcp protocol = socket.local_endpoint().protocol();
    own.assign(protocol, socket.release());
    websocket::stream<tcp::socket> ws(std::move(own));
    ws.accept(req);
    ws.text(true);

    std::mutex qmutex;
    std::deque<std::string> inbound;
    const int sub = session->subscribe(token, [&](const Json& m) {
      std::lock_guard lock(qmutex);
      inbound.push_back(m.dump());
    });
    std::deque<std::string> outbound{first.dump()};
    bool writing = false, closing = false, done = false;
    beast::flat_buffer rbuf;
    asio::steady_timer timer(cio);

    std::function<void()> read_next = [&] {
      ws.async_read(rbuf, [&](beast::error_code ec, std::size_t n) {
        if (ec) {
          done = true;
          timer.cancel();
          return;
        }
        rbuf.consume(n);
        read_next();
      });
    };
    std::function<void()> write_next = [&] {
      if (writing || closing || done || outbound.empty()) return;
      writing = true;
      ws.async_write(asio::buffer(outbound.front()), [&](beast::error_code ec, std::size_t) {
        writing = false;
        if (ec) {
          done = true;
          return;
        }
        outbound.pop_front();
        write_next();
      });
    };
    std::function<void()> tick = [&] {
      timer.expires_after(std::chrono::milliseconds(50));
      timer.async_wait([&](beast::error_code ec) {
        if (ec || done) return;
        {
          std::lock_guard lock(qmutex);
          while (!inbound.empty()) {
            outbound.push_back(std::move(inbound.front()));
            inbound.pop_front();
          }
        }
        write_next();
        const bool drained = outbound.empty() && !writing;
        if (!closing && drained && (stopping || session->finished())) {
          closing = true;
          ws.async_close(websocket::close_code::normal, [&](beast::error_code) {});
        }
        tick();
      });
    };
    read_next();
    write_next();
    tick();
    cio.run();

    session->unsubscribe(sub);
    std::lock_guard lock(mutex);
    open_fds.erase(fd);
    beast::error_code ignored;
    ws.next_layer().close(ignored);
  }
};

Server::Server(SessionManager& sessions, ServerOptions options)
    : impl_(std::make_unique<Impl>(sessions, std::move(options))) {}

Server::~Server() { stop(); }

unsigned short Server::port() const { return impl_->acceptor.local_endpoint().port(); }

void Server::run() {
  impl_->accept();
  impl_->io.run();
}

void Server::stop() {
  Impl& s = *impl_;
  if (s.stopping.exchange(true)) return;
  asio::post(s.io, [&s] {
    beast::error_code ignored;
    s.acceptor.close(ignored);
  });
  s.io.stop();
  std::unique_lock lock(s.mutex);
  for (int fd : s.open_fds) ::shutdown(fd, SHUT_RDWR);
  s.idle.wait_for(lock, std::chrono::seconds(5), [&s] { return s.active == 0; });
}

}  // namespace yle::svc
