#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <functional>
#include <thread>

#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include "oracle.hpp"
#include "yle/external_policy.hpp"

namespace yle {
namespace {

const GameConfig kConfig3 = GameConfig::make(Variant::k3x3, 2);
const std::string kEcho = YLE_ECHO_POLICY;

ExternalPolicySpec pipe_spec(const std::string& args, int timeout_ms = 5000) {
  ExternalPolicySpec spec = parse_external_spec("ext:cmd:" + kEcho + " " + args);
  spec.timeout = std::chrono::milliseconds(timeout_ms);
  return spec;
}

std::string error_code(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const wire::ProtocolError& e) {
    return e.code();
  }
  return "";
}

TEST_CASE("frames and masks") {
  CHECK(wire::encode_frame("{}") == std::string("\0\0\0\2{}", 6));
  Rng rng(1);
  for (int trial = 0; trial < 200; ++trial) {
    ActionMask mask(1 + static_cast<int>(uniform_below(rng, 2400)));
    for (int k = 0; k < mask.size(); ++k) mask.set(k, uniform_below(rng, 3) == 0);
    REQUIRE(wire::decode_mask(wire::encode_mask(mask), mask.size()) == mask);
  }
  CHECK_THROWS_AS(wire::decode_mask("AAAA", 100), wire::ProtocolError);
  const GameState state = new_game(kConfig3, 2);
  for (Encoding enc : {Encoding::kGraph, Encoding::kImage}) {
    const Observation obs = observe(state, 0, MemoryMode::kStandard, enc);
    CHECK(wire::observation_from_json(wire::observation_to_json(obs), 3, 9) == obs);
  }
  CHECK(parse_external_spec("ext:tcp:localhost:7000").port == 7000);
  CHECK_THROWS(parse_external_spec("greedy"));
}

TEST_CASE("echo policy over pipes plays legal actions for a whole episode") {
  ExternalPolicy policy(pipe_spec("--memory perfect --encoding image"));
  GameState state = new_game(kConfig3, 3);
  policy.reset({kConfig3, 0, 0, 3});
  CHECK(policy.name() == "ext:echo");
  CHECK(policy.observation_spec().memory == MemoryMode::kPerfect);
  CHECK(policy.observation_spec().encoding == Encoding::kImage);
  Rng rng(0);
  while (!state.phase.terminal) {
    const int seat = state.phase.current_player;
    const ActionMask mask = legal_mask(state, seat);
    const PolicyOutput out = policy.act(observe(state, seat, MemoryMode::kPerfect, Encoding::kImage), mask, rng);
    REQUIRE(mask.test(out.action));
    REQUIRE(out.action == mask.nth_set(0));
    REQUIRE(out.probs.size() == static_cast<std::size_t>(mask.size()));
    step(state, joint_action_for(state, seat, decode(out.action, kConfig3)));
  }
  policy.on_episode_end(false);
}

TEST_CASE("version mismatch is refused cleanly in both directions") {
  ExternalPolicy old_peer(pipe_spec("--protocol yle/0"));
  CHECK(error_code([&] { old_peer.reset({kConfig3, 0}); }) == "VERSION_MISMATCH");
  ExternalPolicySpec newer = pipe_spec("");
  newer.protocol = "yle/2";
  ExternalPolicy new_env(newer);
  CHECK(error_code([&] { new_env.reset({kConfig3, 0}); }) == "VERSION_MISMATCH");
}

TEST_CASE("misbehaving peers are flagged") {
  const GameState state = new_game(kConfig3, 3);
  const Observation obs = observe(state, 0, MemoryMode::kStandard, Encoding::kGraph);
  const ActionMask mask = legal_mask(state, 0);
  Rng rng(0);
  ExternalPolicy illegal(pipe_spec("--mode illegal"));
  illegal.reset({kConfig3, 0});
  CHECK(error_code([&] { illegal.act(obs, mask, rng); }) == "ILLEGAL_ACTION");
  ExternalPolicy wrong_id(pipe_spec("--mode wrong-id"));
  wrong_id.reset({kConfig3, 0});
  CHECK(error_code([&] { wrong_id.act(obs, mask, rng); }) == "MALFORMED");
  ExternalPolicy slow(pipe_spec("--mode slow --delay-ms 2000", 200));
  slow.reset({kConfig3, 0});
  const auto start = std::chrono::steady_clock::now();
  CHECK(error_code([&] { slow.act(obs, mask, rng); }) == "TIMEOUT");
  CHECK(std::chrono::steady_clock::now() - start < std::chrono::milliseconds(1500));
  // After a failure the next reset reconnects.
  ExternalPolicy dead(pipe_spec("--mode illegal"));
  dead.reset({kConfig3, 0});
  CHECK(error_code([&] { dead.act(obs, mask, rng); }) == "ILLEGAL_ACTION");
  CHECK(error_code([&] { dead.act(obs, mask, rng); }) == "CLOSED");
  CHECK_NOTHROW(dead.reset({kConfig3, 0}));
  CHECK(error_code([&] { ExternalPolicy(parse_external_spec("ext:cmd:false")).reset({kConfig3, 0}); }) != "");
}

// Random masks in; every returned action is legal or the reply is flagged.
TEST_CASE("protocol fuzz") {
  Rng rng(5);
  const GameState state = new_game(kConfig3, 1);
  const Observation obs = observe(state, 0, MemoryMode::kStandard, Encoding::kGraph);
  for (const char* mode : {"uniform", "garbage"}) {
    ExternalPolicy policy(pipe_spec(std::string("--mode ") + mode + " --seed 3"));
    int legal = 0, flagged = 0;
    for (int trial = 0; trial < 300; ++trial) {
      policy.reset({kConfig3, 0, static_cast<std::uint64_t>(trial)});
      ActionMask mask(action_count(kConfig3));
      while (!mask.any()) {
        for (int k = 0; k < mask.size(); ++k) mask.set(k, uniform_below(rng, 50) == 0);
      }
      try {
        const PolicyOutput out = policy.act(obs, mask, rng);
        REQUIRE(mask.test(out.action));
        ++legal;
      } catch (const wire::ProtocolError&) {
        ++flagged;
      }
    }
    CHECK(legal + flagged == 300);
    if (std::string(mode) == "uniform") CHECK(flagged == 0);
    else CHECK(flagged > 100);
  }
}

TEST_CASE("tcp transport") {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  REQUIRE(::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof addr) == 0);
  REQUIRE(::listen(listener, 1) == 0);
  socklen_t len = sizeof addr;
  ::getsockname(listener, reinterpret_cast<sockaddr*>(&addr), &len);
  const int port = ntohs(addr.sin_port);
  std::thread server([listener] {
    const int fd = ::accept(listener, nullptr, nullptr);
    serve_echo_policy(fd, fd, EchoOptions{});
    ::close(fd);
  });
  {
    ExternalPolicy policy(parse_external_spec("ext:tcp:127.0.0.1:" + std::to_string(port)));
    GameState state = new_game(kConfig3, 9);
    policy.reset({kConfig3, 1});
    Rng rng(0);
    for (int t = 0; t < 10; ++t) {
      const ActionMask mask = legal_mask(state, 1);
      const PolicyOutput out = policy.act(observe(state, 1, MemoryMode::kStandard, Encoding::kGraph), mask, rng);
      CHECK(mask.test(out.action));
      step(state, joint_action_for(state, state.phase.current_player,
                                   oracle::random_action_no_end(state, rng)));
      if (state.phase.terminal) break;
    }
  }
  server.join();
  ::close(listener);
}

}  // namespace
}  // namespace yle
