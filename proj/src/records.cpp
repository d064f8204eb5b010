#include "yle/records.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

#include "yle/reward.hpp"

namespace yle {

using nlohmann::json;

std::vector<int> knowledge_labels(const GameState& state, int agent) {
  std::vector<int> out(static_cast<std::size_t>(state.config.num_cards), -1);
  for_each_bit(state.peek_history[agent], [&](int card) { out[card] = state.board.colours[card]; });
  return out;
}

TerminalRecord terminal_record(const GameState& state) {
  if (!state.phase.terminal || !state.phase.outcome) throw ContractError("terminal_record needs a terminal state");
  TerminalRecord t;
  t.won = state.phase.outcome->won;
  t.ended_early = state.phase.ended_early;
  t.score = state.phase.outcome->score;
  t.complete_clusters = count_complete_colour_clusters(state);
  t.length = state.step_count;
  t.reward = terminal_reward(state);
  return t;
}

EpisodeRecorder::EpisodeRecorder(const GameState& start, std::uint64_t episode,
                                 std::vector<std::string> seats) {
  record_.config = start.config;
  record_.episode = episode;
  record_.seed = start.seed;
  record_.seats = std::move(seats);
  record_.symmetries.assign(start.config.num_players, Symmetry::identity(start.config.num_colours));
}

void EpisodeRecorder::set_symmetries(SymmetryMode mode, std::vector<Symmetry> draws) {
  record_.symmetry_mode = mode;
  record_.symmetries = std::move(draws);
}

namespace {

void snapshot(const GameState& state, StepRecord& step) {
  const int n = state.config.num_cards;
  step.colours.assign(state.board.colours.begin(), state.board.colours.begin() + n);
  step.team_peeked.assign(state.team_peeked.begin(), state.team_peeked.begin() + n);
  step.knowledge.clear();
  for (int a = 0; a < state.config.num_players; ++a) step.knowledge.push_back(knowledge_labels(state, a));
}

}  // namespace

void EpisodeRecorder::record_step(const GameState& before, int actor, int action,
                                  const EventList& events, const GameState& after) {
  StepRecord step;
  step.actor = actor;
  step.substep = before.phase.substep;
  step.action = action;
  step.events = events;
  step.reward = step_reward(after, events, 0.0).total;
  snapshot(before, step);
  record_.steps.push_back(std::move(step));
  if (after.phase.terminal) record_.terminal = terminal_record(after);
}

void EpisodeRecorder::abort(const std::string& reason) {
  record_.aborted = true;
  record_.abort_reason = reason;
}

json symmetry_to_json(const Symmetry& sym) {
  return json{{"colour_perm", std::vector<int>(sym.colour_perm.begin(), sym.colour_perm.begin() + sym.num_colours)},
              {"rotation", std::string(to_string(sym.rotation))}};
}

Symmetry symmetry_from_json(const json& j) {
  const std::vector<int> perm = j.at("colour_perm").get<std::vector<int>>();
  Symmetry s = Symmetry::identity(static_cast<int>(perm.size()));
  for (std::size_t c = 0; c < perm.size(); ++c) s.colour_perm[c] = static_cast<std::uint8_t>(perm[c]);
  const std::string rot = j.at("rotation");
  for (int r = 0; r < 4; ++r) {
    if (to_string(static_cast<Rotation>(r)) == rot) s.rotation = static_cast<Rotation>(r);
  }
  return s;
}

EventKind parse_event_kind(std::string_view text) {
  for (int k = 0; k <= static_cast<int>(EventKind::kGameEnded); ++k) {
    if (to_string(static_cast<EventKind>(k)) == text) return static_cast<EventKind>(k);
  }
  throw std::invalid_argument("unknown event kind '" + std::string(text) + "'");
}

Substep parse_substep(std::string_view text) {
  for (int s = 0; s < 4; ++s) {
    if (to_string(static_cast<Substep>(s)) == text) return static_cast<Substep>(s);
  }
  throw std::invalid_argument("unknown substep '" + std::string(text) + "'");
}

json event_to_json(const Event& e) {
  json j{{"kind", std::string(to_string(e.kind))}};
  if (e.card != kNoCard) j["card"] = e.card;
  if (e.hint >= 0) j["hint"] = e.hint;
  if (e.kind == EventKind::kGameEnded) {
    j["early"] = e.early;
    j["won"] = e.won;
  }
  return j;
}

Event event_from_json(const json& j) {
  Event e;
  e.kind = parse_event_kind(j.at("kind").get<std::string>());
  e.card = j.value("card", kNoCard);
  e.hint = j.value("hint", -1);
  e.early = j.value("early", false);
  e.won = j.value("won", false);
  return e;
}

json to_json(const EpisodeRecord& r) {
  json j;
  j["schema"] = kEpisodeSchema;
  j["config"] = {{"variant", std::string(to_string(r.config.variant))},
                 {"players", r.config.num_players},
                 {"hint_targets", std::string(to_string(r.config.hint_target_indexing))},
                 {"seed", r.config.seed},
                 {"digest", r.config.digest()}};
  j["episode"] = r.episode;
  j["seed"] = r.seed;
  j["seats"] = r.seats;
  j["symmetry_mode"] = std::string(to_string(r.symmetry_mode));
  j["symmetries"] = json::array();
  for (const Symmetry& s : r.symmetries) j["symmetries"].push_back(symmetry_to_json(s));
  j["steps"] = json::array();
  const ActionLayout layout = ActionLayout::of(r.config);
  for (const StepRecord& s : r.steps) {
    json events = json::array();
    for (const Event& e : s.events) events.push_back(event_to_json(e));
    j["steps"].push_back({{"actor", s.actor},
                          {"substep", std::string(to_string(s.substep))},
                          {"action", s.action},
                          {"action_text", to_string(layout.decode(s.action))},
                          {"events", events},
                          {"reward", s.reward},
                          {"colours", s.colours},
                          {"team_peeked", s.team_peeked},
                          {"knowledge", s.knowledge}});
  }
  if (r.terminal) {
    j["terminal"] = {{"won", r.terminal->won},
                     {"early", r.terminal->ended_early},
                     {"score", r.terminal->score},
                     {"nc", r.terminal->complete_clusters},
                     {"length", r.terminal->length},
                     {"reward", r.terminal->reward}};
  } else {
    j["terminal"] = nullptr;
  }
  j["aborted"] = r.aborted;
  if (r.aborted) j["abort_reason"] = r.abort_reason;
  return j;
}

EpisodeRecord episode_from_json(const json& j) {
  if (j.value("schema", std::string()) != kEpisodeSchema) {
    throw std::invalid_argument("not a " + std::string(kEpisodeSchema) + " record");
  }
  EpisodeRecord r;
  const json& c = j.at("config");
  r.config = GameConfig::make(parse_variant(c.at("variant").get<std::string>()), c.at("players").get<int>(),
                              parse_hint_target_indexing(c.at("hint_targets").get<std::string>()),
                              c.value("seed", std::uint64_t{0}));
  if (c.contains("digest") && c.at("digest") != r.config.digest()) {
    throw std::invalid_argument("config digest does not match the config");
  }
  r.episode = j.at("episode");
  r.seed = j.at("seed");
  r.seats = j.at("seats").get<std::vector<std::string>>();
  r.symmetry_mode = parse_symmetry_mode(j.at("symmetry_mode").get<std::string>());
  for (const json& s : j.at("symmetries")) r.symmetries.push_back(symmetry_from_json(s));
  for (const json& s : j.at("steps")) {
    StepRecord step;
    step.actor = s.at("actor");
    step.substep = parse_substep(s.at("substep").get<std::string>());
    step.action = s.at("action");
    for (const json& e : s.at("events")) step.events.push_back(event_from_json(e));
    step.reward = s.at("reward");
    step.colours = s.at("colours").get<std::vector<int>>();
    step.team_peeked = s.at("team_peeked").get<std::vector<int>>();
    step.knowledge = s.at("knowledge").get<std::vector<std::vector<int>>>();
    r.steps.push_back(std::move(step));
  }
  if (!j.at("terminal").is_null()) {
    const json& t = j.at("terminal");
    r.terminal = TerminalRecord{t.at("won"), t.at("early"), t.at("score"), t.at("nc"), t.at("length"), t.at("reward")};
  }
  r.aborted = j.at("aborted");
  r.abort_reason = j.value("abort_reason", std::string());
  return r;
}

void write_jsonl(std::ostream& out, const std::vector<EpisodeRecord>& records) {
  for (const EpisodeRecord& r : records) out << to_json(r).dump() << '\n';
}

std::vector<EpisodeRecord> read_jsonl(std::istream& in) {
  std::vector<EpisodeRecord> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    out.push_back(episode_from_json(json::parse(line)));
  }
  return out;
}

void write_jsonl_file(const std::string& path, const std::vector<EpisodeRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  write_jsonl(out, records);
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::vector<EpisodeRecord> read_jsonl_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  return read_jsonl(in);
}

ReplayResult replay_episode(const EpisodeRecord& record) {
  auto fail = [](std::size_t t, const std::string& what) {
    return ReplayResult{false, "step " + std::to_string(t) + ": " + what};
  };
  GameState state = new_game(record.config, record.seed);
  const ActionLayout layout = ActionLayout::of(record.config);
  for (std::size_t t = 0; t < record.steps.size(); ++t) {
    const StepRecord& s = record.steps[t];
    StepRecord expected;
    snapshot(state, expected);
    if (s.actor != state.phase.current_player) return fail(t, "actor");
    if (s.substep != state.phase.substep) return fail(t, "substep");
    if (s.colours != expected.colours) return fail(t, "colours");
    if (s.team_peeked != expected.team_peeked) return fail(t, "team_peeked");
    if (s.knowledge != expected.knowledge) return fail(t, "knowledge");
    if (s.action < 0 || s.action >= layout.size) return fail(t, "action index");
    EventList events;
    try {
      events = step(state, joint_action_for(state, s.actor, layout.decode(s.action)));
    } catch (const IllegalAction& e) {
      return fail(t, std::string("action refused: ") + e.what());
    }
    if (events != s.events) return fail(t, "events");
    if (step_reward(state, events, 0.0).total != s.reward) return fail(t, "reward");
  }
  if (record.aborted) return {};
  if (!state.phase.terminal) return {false, "episode did not reach a terminal state"};
  if (!record.terminal || *record.terminal != terminal_record(state)) return {false, "terminal"};
  return {};
}

std::size_t write_probing_dataset(const std::string& path, const std::vector<EpisodeRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  std::size_t rows = 0;
  for (const EpisodeRecord& r : records) {
    for (std::size_t t = 0; t < r.steps.size(); ++t) {
      const StepRecord& s = r.steps[t];
      for (int agent = 0; agent < r.config.num_players; ++agent) {
        json row{{"schema", kProbeSchema},
                 {"episode", r.episode},
                 {"seed", r.seed},
                 {"step", t},
                 {"agent", agent},
                 {"actor", s.actor},
                 {"substep", std::string(to_string(s.substep))},
                 {"obs_ref", {{"episode", r.episode}, {"step", t}, {"agent", agent}}},
                 {"colours", s.colours},
                 {"knowledge", s.knowledge[agent]},
                 {"team_peeked", s.team_peeked}};
        out << row.dump() << '\n';
        ++rows;
      }
    }
  }
  if (!out) throw std::runtime_error("write failed: " + path);
  return rows;
}

}  // namespace yle
