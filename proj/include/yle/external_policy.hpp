#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "yle/agents.hpp"
#include "yle/wire.hpp"

namespace yle {

// Bidirectional frame channel to an external policy process.
class Channel {
 public:
  virtual ~Channel() = default;
  virtual void send(const wire::Json& message, std::chrono::milliseconds timeout) = 0;
  virtual wire::Json receive(std::chrono::milliseconds timeout) = 0;
};

// Runs `command` under /bin/sh with its stdin/stdout connected to pipes.
// The child is killed when the channel is destroyed.
class PipeChannel final : public Channel {
 public:
  explicit PipeChannel(const std::string& command);
  ~PipeChannel() override;
  void send(const wire::Json& message, std::chrono::milliseconds timeout) override;
  wire::Json receive(std::chrono::milliseconds timeout) override;

 private:
  int to_child_ = -1;
  int from_child_ = -1;
  int pid_ = -1;
};

class TcpChannel final : public Channel {
 public:
  TcpChannel(const std::string& host, int port, std::chrono::milliseconds timeout);
  // Takes ownership of a connected socket.
  explicit TcpChannel(int fd) : fd_(fd) {}
  ~TcpChannel() override;
  void send(const wire::Json& message, std::chrono::milliseconds timeout) override;
  wire::Json receive(std::chrono::milliseconds timeout) override;

 private:
  int fd_ = -1;
};

struct ExternalPolicySpec {
  enum class Transport { kSubprocessPipes, kTcpSocket };
  Transport transport = Transport::kSubprocessPipes;
  std::string command;  // pipes
  std::string host;     // tcp
  int port = 0;         // tcp
  std::chrono::milliseconds timeout{10000};
  std::string protocol = wire::kProtocol;
};

// "ext:cmd:<shell command>" or "ext:tcp:<host>:<port>".
ExternalPolicySpec parse_external_spec(const std::string& text);

// Policy answered over the yle/1 wire protocol. The handshake runs on the
// first reset(); the observation spec requested by the peer is available
// from then on. Protocol failures throw wire::ProtocolError and drop the
// connection; the next reset() reconnects.
class ExternalPolicy final : public Policy {
 public:
  explicit ExternalPolicy(ExternalPolicySpec spec);
  ~ExternalPolicy() override;

  std::string name() const override;
  ObservationSpec observation_spec() const override { return spec_obs_; }
  void reset(const EpisodeContext& context) override;
  PolicyOutput act(const Observation& obs, const ActionMask& mask, Rng& rng) override;
  void on_episode_end(bool aborted) override;

 private:
  void connect();
  void drop();

  ExternalPolicySpec spec_;
  std::unique_ptr<Channel> channel_;
  std::string peer_name_ = "external";
  std::string connected_digest_;
  ObservationSpec spec_obs_;
  std::uint64_t next_id_ = 1;
  int step_ = 0;
};

// Test double behaviour for the echo policy server.
struct EchoOptions {
  enum class Mode { kFirstLegal, kUniform, kIllegal, kGarbage, kSlow, kWrongId };
  Mode mode = Mode::kFirstLegal;
  std::string protocol = wire::kProtocol;
  ObservationSpec observation;
  std::chrono::milliseconds delay{0};
  std::uint64_t seed = 0;
};

EchoOptions::Mode parse_echo_mode(const std::string& text);

// Serves one connection until the peer says bye or closes the stream.
void serve_echo_policy(int in_fd, int out_fd, const EchoOptions& options);

}  // namespace yle
