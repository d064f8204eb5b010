#include "yle/session.hpp"

#include <cstdio>
#include <fstream>

#include "yle/action_mask.hpp"
#include "yle/observation.hpp"
#include "yle/policy_spec.hpp"

namespace yle::svc {

namespace {

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

Json cell_json(Cell c) { return Json::array({c.row, c.col}); }

Json colour_list(ColourMask mask, int num_colours) {
  Json out = Json::array();
  for (int c = 0; c < num_colours; ++c) {
    if ((mask >> c) & 1U) out.push_back(c);
  }
  return out;
}

const char* status_name(HintStatus s) {
  switch (s) {
    case HintStatus::kFaceDown: return "face_down";
    case HintStatus::kRevealed: return "revealed";
    case HintStatus::kPlaced: return "placed";
  }
  return "?";
}

const char* kind_name(ActionKind k) {
  switch (k) {
    case ActionKind::kNoOp: return "no_op";
    case ActionKind::kEndGame: return "end_game";
    case ActionKind::kObserveCard: return "observe";
    case ActionKind::kMoveCard: return "move";
    case ActionKind::kRevealHint: return "reveal";
    case ActionKind::kPlaceHint: return "place";
  }
  return "?";
}

const char* seen_name(float code) {
  if (code == kSeenBoth) return "both";
  if (code == kSeenObserverOnly) return "you";
  if (code == kSeenOthersOnly) return "others";
  return "none";
}

}  // namespace

Json Rejection::to_json() const {
  return Json{{"protocol", kServiceProtocol}, {"type", "rejected"}, {"reason", code_}, {"detail", what()}};
}

SessionOptions session_options_from_json(const Json& j, const SessionOptions& defaults) {
  SessionOptions o = defaults;
  try {
    if (j.contains("variant") || j.contains("players") || j.contains("hint_targets")) {
      Json c = wire::config_to_json(defaults.config);
      for (const char* key : {"variant", "players", "hint_targets"}) {
        if (j.contains(key)) c[key] = j.at(key);
      }
      c.erase("digest");
      c.erase("seed");
      o.config = wire::config_from_json(c);
    }
    o.seed = j.value("seed", defaults.seed);
    o.casual_memory = j.value("casual_memory", defaults.casual_memory);
    if (j.contains("seats")) {
      o.seats = j.at("seats").get<std::vector<std::string>>();
    } else {
      o.seats.resize(o.config.num_players, defaults.seats.empty() ? "greedy" : defaults.seats.back());
      o.seats[0] = "human";
    }
  } catch (const Json::exception& e) {
    throw Rejection("MALFORMED", e.what());
  } catch (const std::invalid_argument& e) {
    throw Rejection("MALFORMED", e.what());
  }
  if (static_cast<int>(o.seats.size()) != o.config.num_players) {
    throw Rejection("MALFORMED", "need one seat entry per player");
  }
  for (const std::string& seat : o.seats) {
    if (seat == "human") continue;
    try {
      check_policy_spec(seat);
    } catch (const std::invalid_argument& e) {
      throw Rejection("MALFORMED", e.what());
    }
  }
  return o;
}

Json score_breakdown(const GameState& state) {
  const int face_down = count_hints(state, HintStatus::kFaceDown);
  const int revealed = count_hints(state, HintStatus::kRevealed);
  const int correct = count_correct_hints(state);
  const int wrong = count_wrong_hints(state);
  return Json{{"face_down", face_down},
              {"revealed_unplaced", revealed},
              {"correct", correct},
              {"wrong", wrong},
              {"pool_score", 5 * face_down + 2 * revealed + correct - wrong}};
}

Json seat_view(const GameState& state, int seat, bool casual) {
  const GameConfig& config = state.config;
  const MemoryMode mode = casual ? MemoryMode::kPerfect : MemoryMode::kStandard;
  const ActionLayout layout = ActionLayout::of(config);
  Json v;
  v["protocol"] = kServiceProtocol;
  v["type"] = "view";
  v["seat"] = seat;
  v["casual_memory"] = casual;
  v["config"] = wire::config_to_json(config);
  v["config"].erase("seed");

  const TurnPhase& ph = state.phase;
  Json peeked = Json::array();
  for (int k = 0; k < ph.num_peeked; ++k) peeked.push_back(ph.peeked[k]);
  v["phase"] = {{"current_player", ph.current_player},
                {"substep", std::string(to_string(ph.substep))},
                {"terminal", ph.terminal},
                {"your_turn", !ph.terminal && ph.current_player == seat},
                {"inspected_this_turn", peeked}};

  Json cards = Json::array();
  Json peek_log = Json::array();
  for (int i = 0; i < config.num_cards; ++i) {
    Json card{{"id", i},
              {"cell", cell_json(state.board.positions[i])},
              {"locked", state.board.is_locked(i)},
              {"inspected_by", seen_name(seen_code(state, seat, i))}};
    if (colour_visible(state, seat, i, mode)) {
      card["colour"] = state.board.colours[i];
      peek_log.push_back({{"card", i}, {"colour", state.board.colours[i]}});
    }
    cards.push_back(card);
  }
  v["board"] = {{"grid_side", config.grid_side}, {"cards", cards}};
  v["peek_log"] = peek_log;

  Json hints = Json::array();
  for (const HintCard& h : state.hints) {
    Json hj{{"id", h.id}, {"status", status_name(h.status)}};
    if (h.status != HintStatus::kFaceDown) hj["colours"] = colour_list(h.colours, config.num_colours);
    if (h.status == HintStatus::kPlaced) {
      hj["card"] = h.placed_on;
      hj["cell"] = cell_json(state.board.positions[h.placed_on]);
    }
    hints.push_back(hj);
  }
  v["hints"] = hints;
  v["hint_pool"] = {{"face_down", count_hints(state, HintStatus::kFaceDown)},
                    {"revealed", count_hints(state, HintStatus::kRevealed)},
                    {"placed", count_hints(state, HintStatus::kPlaced)}};

  const ActionMask mask = legal_mask(state, seat);
  Json counts = Json::object();
  for (int k : mask.indices()) counts[kind_name(layout.decode(k).kind)] = counts.value(kind_name(layout.decode(k).kind), 0) + 1;
  v["legal"] = {{"n_actions", layout.size}, {"mask", wire::encode_mask(mask)}, {"counts", counts}};

  if (ph.terminal) {
    const Outcome outcome = ph.outcome.value_or(Outcome{});
    v["result"] = {{"won", outcome.won},
                   {"ended_early", ph.ended_early},
                   {"score", outcome.score},
                   {"complete_clusters", count_complete_colour_clusters(state)},
                   {"breakdown", score_breakdown(state)}};
  }
  v["obs"] = wire::observation_to_json(observe(state, seat, mode, Encoding::kGraph));
  return v;
}

// ---------------------------------------------------------------------------

Session::Session(std::string id, SessionOptions options, std::uint64_t token_seed)
    : id_(std::move(id)),
      options_(std::move(options)),
      state_(new_game(options_.config, options_.seed)),
      token_rng_(token_seed),
      tokens_(options_.config.num_players),
      recorder_(state_, 0, options_.seats) {
  const int n = options_.config.num_players;
  scripted_.resize(n);
  for (int s = 0; s < n; ++s) {
    scripted_rng_.emplace_back(derive_seed({options_.seed, 0x5e55, static_cast<std::uint64_t>(s)}));
    if (options_.seats[s] == "human") continue;
    scripted_[s] = make_policy(options_.seats[s]);
  }
}

void Session::start() {
  std::lock_guard lock(mutex_);
  try {
    for (int s = 0; s < options_.config.num_players; ++s) {
      if (scripted_[s]) {
        scripted_[s]->reset({options_.config, s, 0, derive_seed({options_.seed, 0x5e55, static_cast<std::uint64_t>(s)})});
      }
    }
  } catch (const std::exception& e) {
    throw Rejection("POLICY_FAILED", e.what());
  }
  run_scripted();
}

std::string Session::join(int seat) {
  std::lock_guard lock(mutex_);
  if (seat < 0 || seat >= options_.config.num_players) throw Rejection("BAD_SEAT", "no such seat");
  if (scripted_[seat]) throw Rejection("BAD_SEAT", "seat is played by '" + options_.seats[seat] + "'");
  if (tokens_[seat]) throw Rejection("SEAT_TAKEN", "seat already joined");
  tokens_[seat] = hex64(token_rng_()) + hex64(token_rng_());
  return *tokens_[seat];
}

int Session::seat_of(const std::string& token) const {
  for (std::size_t s = 0; s < tokens_.size(); ++s) {
    if (tokens_[s] && *tokens_[s] == token) return static_cast<int>(s);
  }
  throw Rejection("BAD_TOKEN", "unknown seat token");
}

Json Session::stamp(Json message) const {
  message["protocol"] = kServiceProtocol;
  message["session"] = id_;
  message["version"] = version_;
  return message;
}

Json Session::view(const std::string& token) const {
  std::lock_guard lock(mutex_);
  const int seat = seat_of(token);
  Json v = stamp(seat_view(state_, seat, options_.casual_memory));
  v["seats"] = options_.seats;
  v["journal"] = journal_;
  v["status"] = aborted_ ? "aborted" : (state_.phase.terminal ? "finished" : "running");
  if (aborted_) v["abort_reason"] = abort_reason_;
  return v;
}

Json Session::legal_targets(const std::string& token, int card) const {
  std::lock_guard lock(mutex_);
  const int seat = seat_of(token);
  Json cells = Json::array();
  if (card < 0 || card >= options_.config.num_cards) throw Rejection("MALFORMED", "card out of range");
  if (!aborted_ && !state_.phase.terminal && seat == state_.phase.current_player &&
      state_.phase.substep == Substep::kMove) {
    const ActionLayout layout = ActionLayout::of(options_.config);
    for (int k : legal_mask(state_, seat).indices()) {
      const Action a = layout.decode(k);
      if (a.kind == ActionKind::kMoveCard && a.card == card) cells.push_back(cell_json(a.cell));
    }
  }
  return stamp(Json{{"type", "targets"}, {"card", card}, {"cells", cells}});
}

Json Session::submit(const std::string& token, const Json& request) {
  std::lock_guard lock(mutex_);
  const int seat = seat_of(token);
  if (aborted_) throw Rejection("SESSION_ABORTED", abort_reason_);
  if (state_.phase.terminal) throw Rejection("GAME_OVER", "the game has ended");
  if (seat != state_.phase.current_player) throw Rejection("OUT_OF_TURN", "it is not this seat's turn");
  if (request.contains("version") && request.at("version") != version_) {
    throw Rejection("STALE_VIEW", "view version " + request.at("version").dump() + " is behind " +
                                      std::to_string(version_));
  }
  const ActionLayout layout = ActionLayout::of(options_.config);
  Action action;
  try {
    action = wire::action_from_json(request.at("action"), layout);
  } catch (const std::exception& e) {
    throw Rejection("MALFORMED", e.what());
  }
  // Cards are easier to name than cells from a UI.
  if (action.kind == ActionKind::kPlaceHint && layout.indexing == HintTargetIndexing::kCell &&
      action.cell.row < 0) {
    if (action.card < 0 || action.card >= options_.config.num_cards) throw Rejection("ILLEGAL_TARGET", "no such card");
    action.cell = state_.board.positions[action.card];
    action.card = -1;
  }
  try {
    validate_action(state_, seat, action);
  } catch (const IllegalAction& e) {
    if (e.reason() == RejectReason::kIllegalTarget) throw Rejection("ILLEGAL_TARGET", e.what());
    throw Rejection("ILLEGAL_ACTION", e.what());
  }
  const int index = layout.encode(action);
  if (!legal_mask(state_, seat).test(index)) throw Rejection("ILLEGAL_ACTION", "action is masked");
  apply(seat, action);
  run_scripted();
  return stamp(Json{{"type", "accepted"}, {"action", index}});
}

void Session::apply(int seat, const Action& action) {
  const ActionLayout layout = ActionLayout::of(options_.config);
  const GameState before = state_;
  const EventList events = step(state_, joint_action_for(state_, seat, action));
  recorder_.record_step(before, seat, layout.encode(action), events, state_);
  ++version_;
  Json entry{{"version", version_}, {"seat", seat}, {"kind", kind_name(action.kind)}};
  if (action.card >= 0) entry["card"] = action.card;
  if (action.cell.row >= 0) entry["cell"] = cell_json(action.cell);
  if (action.hint >= 0) entry["hint"] = action.hint;
  journal_.push_back(entry);
  publish(seat, action, before);
  if (state_.phase.terminal && on_finish_) on_finish_(recorder_.record());
}

void Session::run_scripted() {
  const ActionLayout layout = ActionLayout::of(options_.config);
  while (!aborted_ && !state_.phase.terminal) {
    const int seat = state_.phase.current_player;
    Policy* policy = scripted_[seat].get();
    if (!policy) return;
    try {
      const ObservationSpec spec = policy->observation_spec();
      const ActionMask mask = legal_mask(state_, seat);
      const PolicyOutput out = policy->act(observe(state_, seat, spec.memory, spec.encoding), mask, scripted_rng_[seat]);
      if (out.action < 0 || out.action >= layout.size || !mask.test(out.action)) {
        throw PolicyError("ILLEGAL_ACTION: scripted seat chose a masked action");
      }
      apply(seat, layout.decode(out.action));
    } catch (const std::exception& e) {
      aborted_ = true;
      abort_reason_ = e.what();
      recorder_.abort(abort_reason_);
      ++version_;
      for (int s = 0; s < options_.config.num_players; ++s) {
        fan_out(s, Json{{"type", "session_aborted"}, {"reason", abort_reason_}});
      }
    }
  }
}

void Session::publish(int actor, const Action& action, const GameState& before) {
  const int n = options_.config.num_players;
  const int nc = options_.config.num_colours;
  for (int s = 0; s < n; ++s) {
    Json m{{"seat", actor}, {"substep", std::string(to_string(before.phase.substep))}};
    switch (action.kind) {
      case ActionKind::kObserveCard:
        m["card"] = action.card;
        if (s == actor) {
          m["type"] = "peeked";
          m["colour"] = state_.board.colours[action.card];
        } else {
          m["type"] = "inspected";
        }
        break;
      case ActionKind::kMoveCard:
        m["type"] = "moved";
        m["card"] = action.card;
        m["from"] = cell_json(before.board.positions[action.card]);
        m["to"] = cell_json(action.cell);
        break;
      case ActionKind::kRevealHint:
        m["type"] = "hint_revealed";
        m["hint"] = action.hint;
        m["colours"] = colour_list(state_.hints[action.hint].colours, nc);
        break;
      case ActionKind::kPlaceHint: {
        const HintCard& h = state_.hints[action.hint];
        m["type"] = "hint_placed";
        m["hint"] = action.hint;
        m["card"] = h.placed_on;
        m["cell"] = cell_json(state_.board.positions[h.placed_on]);
        m["colours"] = colour_list(h.colours, nc);
        break;
      }
      case ActionKind::kEndGame: m["type"] = "end_requested"; break;
      case ActionKind::kNoOp: m["type"] = "skipped"; break;
    }
    fan_out(s, m);
    if (!state_.phase.terminal && state_.phase.current_player != before.phase.current_player) {
      fan_out(s, Json{{"type", "turn_passed"}, {"from", before.phase.current_player},
                      {"to", state_.phase.current_player}});
    }
    if (state_.phase.terminal) {
      const Outcome outcome = state_.phase.outcome.value_or(Outcome{});
      fan_out(s, Json{{"type", "game_ended"},
                      {"won", outcome.won},
                      {"ended_early", state_.phase.ended_early},
                      {"score", outcome.score},
                      {"complete_clusters", count_complete_colour_clusters(state_)},
                      {"breakdown", score_breakdown(state_)}});
    }
  }
}

void Session::fan_out(int seat, Json message) {
  message = stamp(std::move(message));
  for (auto& [id, sub] : subscribers_) {
    if (sub.seat == seat) sub.sink(message);
  }
}

int Session::subscribe(const std::string& token, PushSink sink) {
  std::lock_guard lock(mutex_);
  const int seat = seat_of(token);
  const int id = next_subscription_++;
  subscribers_[id] = {seat, std::move(sink)};
  return id;
}

void Session::unsubscribe(int subscription) {
  std::lock_guard lock(mutex_);
  subscribers_.erase(subscription);
}

std::uint64_t Session::version() const {
  std::lock_guard lock(mutex_);
  return version_;
}

bool Session::finished() const {
  std::lock_guard lock(mutex_);
  return state_.phase.terminal || aborted_;
}

bool Session::aborted() const {
  std::lock_guard lock(mutex_);
  return aborted_;
}

EpisodeRecord Session::record() const {
  std::lock_guard lock(mutex_);
  if (!state_.phase.terminal && !aborted_) throw Rejection("NOT_FINISHED", "the game is still running");
  return recorder_.record();
}

// ---------------------------------------------------------------------------

SessionManager::SessionManager(std::uint64_t seed, std::string journal_path, SessionOptions defaults)
    : rng_(seed), journal_path_(std::move(journal_path)), defaults_(std::move(defaults)) {}

Json SessionManager::create(const Json& request) {
  SessionOptions options = session_options_from_json(request, defaults_);
  std::shared_ptr<Session> session;
  {
    std::lock_guard lock(mutex_);
    // Without an explicit seed every session gets a fresh deal.
    if (!request.contains("seed")) options.seed = rng_();
    std::string id = hex64(rng_());
    try {
      session = std::make_shared<Session>(id, options, rng_());
    } catch (const std::exception& e) {
      throw Rejection("POLICY_FAILED", e.what());
    }
    sessions_[id] = session;
  }
  if (!journal_path_.empty()) {
    session->on_finish([this](const EpisodeRecord& record) {
      std::lock_guard lock(journal_mutex_);
      std::ofstream out(journal_path_, std::ios::app);
      out << to_json(record).dump() << '\n';
    });
  }
  session->start();
  Json seats = Json::array();
  for (std::size_t s = 0; s < options.seats.size(); ++s) {
    seats.push_back({{"seat", s}, {"kind", options.seats[s]}});
  }
  return Json{{"protocol", kServiceProtocol},
              {"type", "session_created"},
              {"session", session->id()},
              {"seats", seats},
              {"version", session->version()}};
}

std::shared_ptr<Session> SessionManager::get(const std::string& id) const {
  std::lock_guard lock(mutex_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Rejection("UNKNOWN_SESSION", "no session '" + id + "'");
  return it->second;
}

std::size_t SessionManager::size() const {
  std::lock_guard lock(mutex_);
  return sessions_.size();
}

}  // namespace yle::svc
