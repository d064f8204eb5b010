#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "yle/agents.hpp"
#include "yle/records.hpp"
#include "yle/wire.hpp"

// Turn-based sessions for live play. Every message carries
// "protocol": "yle-svc/1"; see docs/service_api.md for the catalogue.
namespace yle::svc {

using wire::Json;

inline constexpr const char* kServiceProtocol = "yle-svc/1";

// Structured refusal. Codes: UNKNOWN_SESSION, BAD_TOKEN, BAD_SEAT,
// SEAT_TAKEN, OUT_OF_TURN, STALE_VIEW, MALFORMED, ILLEGAL_TARGET,
// ILLEGAL_ACTION, GAME_OVER, NOT_FINISHED, SESSION_ABORTED.
class Rejection : public std::runtime_error {
 public:
  Rejection(std::string code, const std::string& detail)
      : std::runtime_error(detail), code_(std::move(code)) {}
  const std::string& code() const { return code_; }
  Json to_json() const;

 private:
  std::string code_;
};

struct SessionOptions {
  GameConfig config = GameConfig::make(Variant::k3x3, 2);
  std::uint64_t seed = 0;
  bool casual_memory = false;
  // Per seat: "human" or a policy spec.
  std::vector<std::string> seats = {"human", "greedy"};
};

// {"variant", "players", "hint_targets", "seed", "casual_memory", "seats"};
// missing keys fall back to `defaults`.
SessionOptions session_options_from_json(const Json& j, const SessionOptions& defaults = {});

using PushSink = std::function<void(const Json&)>;

// What `seat` may know about `state`: the Standard observation content (or
// the full peek history when `casual`) plus public bookkeeping.
Json seat_view(const GameState& state, int seat, bool casual);

// Hint-pool terms of the score, shown on the terminal screen.
Json score_breakdown(const GameState& state);

class Session {
 public:
  Session(std::string id, SessionOptions options, std::uint64_t token_seed);

  // Lets scripted seats play until a human seat is due.
  void start();

  const std::string& id() const { return id_; }
  const SessionOptions& options() const { return options_; }

  // Claims a human seat. Returns the seat token.
  std::string join(int seat);

  Json view(const std::string& token) const;
  Json legal_targets(const std::string& token, int card) const;
  // {"action": <action json or index>, "version"?: n}.
  Json submit(const std::string& token, const Json& request);

  int subscribe(const std::string& token, PushSink sink);
  void unsubscribe(int subscription);

  std::uint64_t version() const;
  bool finished() const;
  bool aborted() const;
  // Only once the game is over; the record holds every colour.
  EpisodeRecord record() const;

  // Invoked once, under the session lock, when the game ends.
  void on_finish(std::function<void(const EpisodeRecord&)> callback) { on_finish_ = std::move(callback); }

 private:
  int seat_of(const std::string& token) const;
  void apply(int seat, const Action& action);
  void run_scripted();
  void publish(int actor, const Action& action, const GameState& before);
  void fan_out(int seat, Json message);
  Json stamp(Json message) const;

  mutable std::mutex mutex_;
  std::string id_;
  SessionOptions options_;
  GameState state_;
  std::uint64_t version_ = 0;
  Rng token_rng_;
  std::vector<std::optional<std::string>> tokens_;
  std::vector<std::unique_ptr<Policy>> scripted_;
  std::vector<Rng> scripted_rng_;
  EpisodeRecorder recorder_;
  Json journal_ = Json::array();
  bool aborted_ = false;
  std::string abort_reason_;
  struct Subscriber {
    int seat;
    PushSink sink;
  };
  std::map<int, Subscriber> subscribers_;
  int next_subscription_ = 1;
  std::function<void(const EpisodeRecord&)> on_finish_;
};

class SessionManager {
 public:
  // Finished sessions are appended to `journal_path` as JSONL when set.
  explicit SessionManager(std::uint64_t seed = 0, std::string journal_path = {},
                          SessionOptions defaults = {});

  // Returns {"type": "session_created", "session", "seats", "version"}.
  Json create(const Json& request);
  std::shared_ptr<Session> get(const std::string& id) const;
  std::size_t size() const;

 private:
  mutable std::mutex mutex_;
  Rng rng_;
  std::string journal_path_;
  SessionOptions defaults_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::mutex journal_mutex_;
};

}  // namespace yle::svc
