#include "yle/external_policy.hpp"

#include <cerrno>
#include <cmath>
#include <csignal>
#include <cstring>
#include <thread>

#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

namespace yle {

using wire::Json;
using wire::ProtocolError;

namespace {

void ignore_sigpipe() {
  static const bool once = [] {
    std::signal(SIGPIPE, SIG_IGN);
    return true;
  }();
  (void)once;
}

Json parse_message(const std::string& payload) {
  Json j = Json::parse(payload, nullptr, false);
  if (j.is_discarded() || !j.is_object() || !j.contains("type")) {
    throw ProtocolError("MALFORMED", "message is not a JSON object with a type");
  }
  return j;
}

}  // namespace

PipeChannel::PipeChannel(const std::string& command) {
  ignore_sigpipe();
  int in[2], out[2];
  if (::pipe(in) != 0 || ::pipe(out) != 0) throw ProtocolError("SPAWN", std::strerror(errno));
  const pid_t pid = ::fork();
  if (pid < 0) throw ProtocolError("SPAWN", std::strerror(errno));
  if (pid == 0) {
    ::dup2(in[0], STDIN_FILENO);
    ::dup2(out[1], STDOUT_FILENO);
    ::close(in[0]);
    ::close(in[1]);
    ::close(out[0]);
    ::close(out[1]);
    ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in[0]);
  ::close(out[1]);
  to_child_ = in[1];
  from_child_ = out[0];
  pid_ = pid;
}

PipeChannel::~PipeChannel() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  if (pid_ > 0) {
    // Give a well-behaved child a moment to exit on EOF.
    for (int i = 0; i < 20; ++i) {
      if (::waitpid(pid_, nullptr, WNOHANG) == pid_) return;
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    ::kill(pid_, SIGKILL);
    ::waitpid(pid_, nullptr, 0);
  }
}

void PipeChannel::send(const Json& message, std::chrono::milliseconds timeout) {
  wire::write_frame(to_child_, message.dump(), timeout);
}

Json PipeChannel::receive(std::chrono::milliseconds timeout) {
  return parse_message(wire::read_frame(from_child_, timeout));
}

TcpChannel::TcpChannel(const std::string& host, int port, std::chrono::milliseconds timeout) {
  ignore_sigpipe();
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  addrinfo* found = nullptr;
  if (::getaddrinfo(host.c_str(), std::to_string(port).c_str(), &hints, &found) != 0) {
    throw ProtocolError("CONNECT", "cannot resolve " + host);
  }
  for (addrinfo* a = found; a != nullptr && fd_ < 0; a = a->ai_next) {
    const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
    if (fd < 0) continue;
    timeval tv{static_cast<time_t>(timeout.count() / 1000),
               static_cast<suseconds_t>((timeout.count() % 1000) * 1000)};
    ::setsockopt(fd, SOL_SOCKET, SO_SNDTIMEO, &tv, sizeof tv);
    if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
      fd_ = fd;
    } else {
      ::close(fd);
    }
  }
  ::freeaddrinfo(found);
  if (fd_ < 0) throw ProtocolError("CONNECT", "cannot connect to " + host + ":" + std::to_string(port));
  const int one = 1;
  ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
}

TcpChannel::~TcpChannel() {
  if (fd_ >= 0) ::close(fd_);
}

void TcpChannel::send(const Json& message, std::chrono::milliseconds timeout) {
  wire::write_frame(fd_, message.dump(), timeout);
}

Json TcpChannel::receive(std::chrono::milliseconds timeout) {
  return parse_message(wire::read_frame(fd_, timeout));
}

ExternalPolicySpec parse_external_spec(const std::string& text) {
  ExternalPolicySpec spec;
  if (text.rfind("ext:cmd:", 0) == 0) {
    spec.transport = ExternalPolicySpec::Transport::kSubprocessPipes;
    spec.command = text.substr(8);
    if (spec.command.empty()) throw std::invalid_argument("empty command in '" + text + "'");
    return spec;
  }
  if (text.rfind("ext:tcp:", 0) == 0) {
    const std::string rest = text.substr(8);
    const auto colon = rest.rfind(':');
    if (colon == std::string::npos) throw std::invalid_argument("expected ext:tcp:<host>:<port>");
    spec.transport = ExternalPolicySpec::Transport::kTcpSocket;
    spec.host = rest.substr(0, colon);
    spec.port = std::stoi(rest.substr(colon + 1));
    return spec;
  }
  throw std::invalid_argument("not an external policy spec: '" + text + "'");
}

ExternalPolicy::ExternalPolicy(ExternalPolicySpec spec) : spec_(std::move(spec)) {}

ExternalPolicy::~ExternalPolicy() {
  if (channel_) {
    try {
      channel_->send(Json{{"type", "bye"}}, std::chrono::milliseconds(200));
    } catch (const std::exception&) {
    }
  }
}

std::string ExternalPolicy::name() const { return "ext:" + peer_name_; }

void ExternalPolicy::drop() { channel_.reset(); }

void ExternalPolicy::connect() {
  if (spec_.transport == ExternalPolicySpec::Transport::kSubprocessPipes) {
    channel_ = std::make_unique<PipeChannel>(spec_.command);
  } else {
    channel_ = std::make_unique<TcpChannel>(spec_.host, spec_.port, spec_.timeout);
  }
  const ActionLayout layout = ActionLayout::of(context_.config);
  channel_->send(Json{{"type", "hello"},
                      {"protocol", spec_.protocol},
                      {"seat", context_.seat},
                      {"config", wire::config_to_json(context_.config)},
                      {"n_actions", layout.size}},
                 spec_.timeout);
  const Json ack = channel_->receive(spec_.timeout);
  if (ack.at("type") == "refuse") {
    const std::string reason = ack.value("reason", std::string("REFUSED"));
    drop();
    throw ProtocolError(reason, "policy refused the handshake");
  }
  if (ack.at("type") != "hello_ack") {
    drop();
    throw ProtocolError("MALFORMED", "expected hello_ack");
  }
  if (ack.value("protocol", std::string()) != spec_.protocol) {
    try {
      channel_->send(Json{{"type", "bye"}, {"reason", "VERSION_MISMATCH"}}, spec_.timeout);
    } catch (const ProtocolError&) {
    }
    drop();
    throw ProtocolError("VERSION_MISMATCH", "peer speaks " + ack.value("protocol", std::string("?")));
  }
  if (ack.value("config_digest", std::string()) != context_.config.digest()) {
    drop();
    throw ProtocolError("CONFIG_MISMATCH", "peer did not echo the config digest");
  }
  peer_name_ = ack.value("name", std::string("external"));
  spec_obs_.memory = parse_memory_mode(ack.value("memory", std::string("standard")));
  spec_obs_.encoding = parse_encoding(ack.value("encoding", std::string("graph")));
  connected_digest_ = context_.config.digest();
}

void ExternalPolicy::reset(const EpisodeContext& context) {
  Policy::reset(context);
  step_ = 0;
  if (!channel_ || connected_digest_ != context.config.digest()) connect();
  try {
    channel_->send(Json{{"type", "episode_start"},
                        {"episode", context.episode},
                        {"seat", context.seat},
                        {"seed", context.seed}},
                   spec_.timeout);
  } catch (const ProtocolError&) {
    drop();
    throw;
  }
}

PolicyOutput ExternalPolicy::act(const Observation& obs, const ActionMask& mask, Rng& /*rng*/) {
  if (!channel_) throw ProtocolError("CLOSED", "policy is not connected");
  const std::uint64_t id = next_id_++;
  try {
    channel_->send(Json{{"type", "act"},
                        {"id", id},
                        {"episode", context_.episode},
                        {"step", step_++},
                        {"seat", context_.seat},
                        {"obs", wire::observation_to_json(obs)},
                        {"mask", wire::encode_mask(mask)},
                        {"n_actions", mask.size()}},
                   spec_.timeout);
    const Json reply = channel_->receive(spec_.timeout);
    if (reply.at("type") != "action") throw ProtocolError("MALFORMED", "expected an action message");
    if (!reply.contains("id") || reply.at("id") != id) throw ProtocolError("MALFORMED", "response id mismatch");
    if (!reply.contains("action") || !reply.at("action").is_number_integer()) {
      throw ProtocolError("MALFORMED", "missing integer action");
    }
    const long long action = reply.at("action").get<long long>();
    if (action < 0 || action >= mask.size() || !mask.test(static_cast<int>(action))) {
      throw ProtocolError("ILLEGAL_ACTION", "action " + std::to_string(action) + " is masked");
    }
    PolicyOutput out;
    out.action = static_cast<int>(action);
    if (reply.contains("probs")) {
      if (!reply.at("probs").is_array() || reply.at("probs").size() != static_cast<std::size_t>(mask.size())) {
        throw ProtocolError("MALFORMED", "probs must have n_actions entries");
      }
      out.probs = reply.at("probs").get<std::vector<double>>();
      double total = 0.0;
      for (int k = 0; k < mask.size(); ++k) {
        const double p = out.probs[static_cast<std::size_t>(k)];
        if (!(p >= 0.0) || (!mask.test(k) && p > 1e-6)) {
          throw ProtocolError("MALFORMED", "probs must be non-negative and zero on masked actions");
        }
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-6) throw ProtocolError("MALFORMED", "probs must sum to 1");
    }
    return out;
  } catch (const nlohmann::json::exception& e) {
    drop();
    throw ProtocolError("MALFORMED", e.what());
  } catch (const ProtocolError&) {
    drop();
    throw;
  }
}

void ExternalPolicy::on_episode_end(bool aborted) {
  if (!channel_) return;
  try {
    channel_->send(Json{{"type", "episode_end"}, {"episode", context_.episode}, {"aborted", aborted}},
                   spec_.timeout);
  } catch (const ProtocolError&) {
    drop();
  }
}

EchoOptions::Mode parse_echo_mode(const std::string& text) {
  using Mode = EchoOptions::Mode;
  if (text == "first") return Mode::kFirstLegal;
  if (text == "uniform") return Mode::kUniform;
  if (text == "illegal") return Mode::kIllegal;
  if (text == "garbage") return Mode::kGarbage;
  if (text == "slow") return Mode::kSlow;
  if (text == "wrong-id") return Mode::kWrongId;
  throw std::invalid_argument("unknown echo mode '" + text + "'");
}

void serve_echo_policy(int in_fd, int out_fd, const EchoOptions& options) {
  using Mode = EchoOptions::Mode;
  ignore_sigpipe();
  const auto forever = std::chrono::milliseconds(-1);
  Rng rng(options.seed);
  auto send = [&](const Json& j) { wire::write_frame(out_fd, j.dump(), forever); };
  for (;;) {
    Json msg;
    try {
      msg = parse_message(wire::read_frame(in_fd, forever));
    } catch (const ProtocolError&) {
      return;
    }
    const std::string type = msg.at("type");
    if (type == "bye") return;
    if (type == "hello") {
      if (msg.value("protocol", std::string()) != options.protocol &&
          options.protocol == wire::kProtocol) {
        send(Json{{"type", "refuse"}, {"reason", "VERSION_MISMATCH"}});
        return;
      }
      const GameConfig config = wire::config_from_json(msg.at("config"));
      send(Json{{"type", "hello_ack"},
                {"protocol", options.protocol},
                {"name", "echo"},
                {"config_digest", config.digest()},
                {"memory", std::string(to_string(options.observation.memory))},
                {"encoding", std::string(to_string(options.observation.encoding))}});
      continue;
    }
    if (type != "act") continue;  // notifications
    const int n = msg.at("n_actions");
    const ActionMask mask = wire::decode_mask(msg.at("mask"), n);
    int action = mask.nth_set(0);
    std::vector<double> probs = one_hot(n, action);
    Json reply{{"type", "action"}, {"id", msg.at("id")}};
    switch (options.mode) {
      case Mode::kFirstLegal: break;
      case Mode::kUniform:
        action = mask.nth_set(static_cast<int>(uniform_below(rng, mask.count())));
        probs = uniform_over(mask);
        break;
      case Mode::kIllegal:
        for (int k = 0; k < n; ++k) {
          if (!mask.test(k)) {
            action = k;
            break;
          }
        }
        break;
      case Mode::kGarbage:
        if (uniform_below(rng, 2) == 0) {
          wire::write_frame(out_fd, "{not json", forever);
          continue;
        }
        action = static_cast<int>(uniform_below(rng, n + 5)) - 2;
        probs.clear();
        break;
      case Mode::kSlow: std::this_thread::sleep_for(options.delay); break;
      case Mode::kWrongId: reply["id"] = msg.at("id").get<std::uint64_t>() + 1; break;
    }
    reply["action"] = action;
    if (!probs.empty()) reply["probs"] = probs;
    send(reply);
  }
}

}  // namespace yle
