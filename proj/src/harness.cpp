#include "yle/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <sstream>

#include "yle/wire.hpp"

namespace yle {

using nlohmann::json;

Metrics compute_metrics(const std::vector<EpisodeRecord>& records) {
  Metrics m;
  std::vector<double> rewards;
  for (const EpisodeRecord& r : records) {
    if (r.aborted || !r.terminal) {
      ++m.aborted;
      continue;
    }
    const TerminalRecord& t = *r.terminal;
    rewards.push_back(t.reward);
    m.success_rate += t.won;
    m.successful_early_end += t.won && t.ended_early;
    m.complete_clusters += t.complete_clusters;
    m.mean_length += t.length;
  }
  m.episodes = static_cast<int>(rewards.size());
  if (m.episodes == 0) return m;
  const double n = m.episodes;
  m.success_rate /= n;
  m.successful_early_end /= n;
  m.complete_clusters /= n;
  m.mean_length /= n;
  m.reward_mean = std::accumulate(rewards.begin(), rewards.end(), 0.0) / n;
  double var = 0.0;
  for (double r : rewards) var += (r - m.reward_mean) * (r - m.reward_mean);
  m.reward_std = std::sqrt(var / n);
  return m;
}

MatchResult run_matchup(const std::vector<Policy*>& seats, const GameConfig& config, int episodes,
                        std::uint64_t seed, const MatchOptions& options) {
  if (static_cast<int>(seats.size()) != config.num_players) {
    throw std::invalid_argument("need one policy per seat");
  }
  MatchResult result;
  for (Policy* p : seats) result.seat_names.push_back(p->name());
  const ActionLayout layout = ActionLayout::of(config);
  const int g = config.grid_side;
  for (int e = 0; e < episodes; ++e) {
    const std::uint64_t ep = static_cast<std::uint64_t>(e);
    GameState state = new_game(config, derive_seed({seed, ep, 0}));
    const std::vector<Symmetry> syms = sample_symmetries(config, options.symmetry, derive_seed({seed, ep, 1}));
    std::vector<Rng> rngs;
    for (int s = 0; s < config.num_players; ++s) rngs.emplace_back(derive_seed({seed, ep, 2 + static_cast<std::uint64_t>(s)}));
    EpisodeRecorder recorder(state, ep, result.seat_names);
    recorder.set_symmetries(options.symmetry, syms);
    bool aborted = false;
    try {
      for (int s = 0; s < config.num_players; ++s) {
        seats[s]->request_memory(options.memory);
        // Policies get their own sampling seed, never the deal's.
        seats[s]->reset({config, s, ep, derive_seed({seed, ep, 2 + static_cast<std::uint64_t>(s)})});
      }
      while (!state.phase.terminal) {
        const int actor = state.phase.current_player;
        Policy& policy = *seats[actor];
        const ObservationSpec spec = policy.observation_spec();
        const Symmetry& sym = syms[actor];
        const Observation obs = transform_observation(observe(state, actor, spec.memory, spec.encoding), sym);
        const ActionMask mask = transform_mask_to_agent(legal_mask(state, actor), layout, sym);
        const PolicyOutput out = policy.act(obs, mask, rngs[actor]);
        if (out.action < 0 || out.action >= layout.size || !mask.test(out.action)) {
          throw PolicyError("ILLEGAL_ACTION: policy chose a masked action");
        }
        const Action env_action = transform_action_to_env(layout.decode(out.action), sym, g);
        const GameState before = state;
        const EventList events = step(state, joint_action_for(state, actor, env_action));
        recorder.record_step(before, actor, layout.encode(env_action), events, state);
      }
    } catch (const std::exception& ex) {
      // Policy and protocol failures abort the episode only.
      recorder.abort(ex.what());
      aborted = true;
    }
    for (Policy* p : seats) p->on_episode_end(aborted);
    EpisodeRecord record = recorder.take();
    if (!options.keep_records) record.steps.clear();
    result.records.push_back(std::move(record));
  }
  result.metrics = compute_metrics(result.records);
  return result;
}

MatchResult run_matchup(const std::vector<PolicyFactory>& seats, const GameConfig& config, int episodes,
                        std::uint64_t seed, const MatchOptions& options) {
  std::vector<std::unique_ptr<Policy>> owned;
  std::vector<Policy*> raw;
  for (const PolicyFactory& make : seats) {
    owned.push_back(make());
    raw.push_back(owned.back().get());
  }
  return run_matchup(raw, config, episodes, seed, options);
}

CrossPlayResult summarise_cross_play(std::vector<std::string> names, std::vector<std::vector<Metrics>> cells) {
  CrossPlayResult r;
  r.names = std::move(names);
  r.cells = std::move(cells);
  const std::size_t n = r.cells.size();
  double diag = 0.0, off = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) (i == j ? diag : off) += r.cells[i][j].success_rate;
  }
  r.self_play_sr = n > 0 ? diag / n : 0.0;
  r.cross_play_sr = n > 1 ? off / (n * (n - 1)) : 0.0;
  r.gap = r.self_play_sr - r.cross_play_sr;
  return r;
}

CrossPlayResult cross_play(const std::vector<std::pair<std::string, PolicyFactory>>& pool,
                           const GameConfig& config, int episodes_per_pair, std::uint64_t seed,
                           const MatchOptions& options) {
  if (pool.size() < 2) throw std::invalid_argument("cross-play needs at least two policies");
  std::vector<std::string> names;
  std::vector<std::vector<Metrics>> cells(pool.size(), std::vector<Metrics>(pool.size()));
  for (const auto& entry : pool) names.push_back(entry.first);
  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = 0; j < pool.size(); ++j) {
      std::vector<PolicyFactory> seats(config.num_players, pool[j].second);
      seats[0] = pool[i].second;
      MatchOptions o = options;
      o.keep_records = false;
      // Every cell sees the same deals.
      cells[i][j] = run_matchup(seats, config, episodes_per_pair, seed, o).metrics;
    }
  }
  return summarise_cross_play(std::move(names), std::move(cells));
}

double border_move_rate(const std::vector<EpisodeRecord>& records) {
  std::size_t moves = 0, border = 0;
  for (const EpisodeRecord& r : records) {
    const ActionLayout layout = ActionLayout::of(r.config);
    const int g = r.config.grid_side;
    for (const StepRecord& s : r.steps) {
      const Action a = layout.decode(s.action);
      if (a.kind != ActionKind::kMoveCard) continue;
      ++moves;
      border += a.cell.row == 0 || a.cell.col == 0 || a.cell.row == g - 1 || a.cell.col == g - 1;
    }
  }
  return moves == 0 ? 0.0 : static_cast<double>(border) / static_cast<double>(moves);
}

std::string format_metrics_table(const std::vector<std::pair<std::string, Metrics>>& rows) {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-24s %8s %16s %7s %6s %7s %8s %7s\n", "matchup", "games", "R (mean+-std)",
                "SR", "NC", "SEE", "length", "aborted");
  os << line;
  for (const auto& [name, m] : rows) {
    char r[32];
    std::snprintf(r, sizeof r, "%.2f+-%.2f", m.reward_mean, m.reward_std);
    std::snprintf(line, sizeof line, "%-24s %8d %16s %7.3f %6.2f %7.3f %8.2f %7d\n", name.c_str(), m.episodes, r,
                  m.success_rate, m.complete_clusters, m.successful_early_end, m.mean_length, m.aborted);
    os << line;
  }
  return os.str();
}

json metrics_to_json(const Metrics& m) {
  return json{{"episodes", m.episodes},        {"aborted", m.aborted},
              {"R_mean", m.reward_mean},       {"R_std", m.reward_std},
              {"SR", m.success_rate},          {"NC", m.complete_clusters},
              {"SEE", m.successful_early_end}, {"mean_length", m.mean_length}};
}

std::string format_cross_play(const CrossPlayResult& result) {
  std::ostringstream os;
  char line[128];
  os << "SR by seat-0 policy (rows) x partner policy (columns)\n";
  std::snprintf(line, sizeof line, "%-16s", "");
  os << line;
  for (const std::string& n : result.names) {
    std::snprintf(line, sizeof line, " %12s", n.substr(0, 12).c_str());
    os << line;
  }
  os << '\n';
  for (std::size_t i = 0; i < result.names.size(); ++i) {
    std::snprintf(line, sizeof line, "%-16s", result.names[i].substr(0, 16).c_str());
    os << line;
    for (std::size_t j = 0; j < result.names.size(); ++j) {
      std::snprintf(line, sizeof line, " %12.3f", result.cells[i][j].success_rate);
      os << line;
    }
    os << '\n';
  }
  std::snprintf(line, sizeof line, "SP %.3f  XP %.3f  gap %.3f\n", result.self_play_sr, result.cross_play_sr,
                result.gap);
  os << line;
  return os.str();
}

// ---------------------------------------------------------------------------

namespace {

HintStatus parse_hint_status(const std::string& s) {
  if (s == "face_down") return HintStatus::kFaceDown;
  if (s == "revealed") return HintStatus::kRevealed;
  if (s == "placed") return HintStatus::kPlaced;
  throw std::invalid_argument("unknown hint status '" + s + "'");
}

const char* hint_status_name(HintStatus s) {
  switch (s) {
    case HintStatus::kFaceDown: return "face_down";
    case HintStatus::kRevealed: return "revealed";
    case HintStatus::kPlaced: return "placed";
  }
  return "?";
}

}  // namespace

DiagnosticScenario scenario_from_json(const json& j) {
  DiagnosticScenario s;
  s.name = j.value("name", std::string("scenario"));
  const json& c = j.at("config");
  const GameConfig config =
      GameConfig::make(parse_variant(c.at("variant").get<std::string>()), c.at("players").get<int>(),
                       parse_hint_target_indexing(c.value("hint_targets", std::string("cell"))));
  std::vector<Cell> cells;
  std::vector<std::uint8_t> colours;
  for (const json& card : j.at("cards")) {
    const auto rc = card.at("cell").get<std::vector<int>>();
    cells.push_back({rc.at(0), rc.at(1)});
    colours.push_back(card.at("colour").get<std::uint8_t>());
  }
  std::vector<HintCard> hints;
  for (const json& h : j.at("hints")) {
    HintCard hint;
    hint.id = static_cast<int>(hints.size());
    for (int colour : h.at("colours").get<std::vector<int>>()) hint.colours |= ColourMask(1U << colour);
    hint.status = parse_hint_status(h.at("status"));
    hint.placed_on = h.value("placed_on", kNoCard);
    hints.push_back(hint);
  }
  TurnPhase phase;
  const json& p = j.at("phase");
  phase.current_player = p.at("current_player");
  phase.substep = parse_substep(p.at("substep").get<std::string>());
  const auto peeked = p.value("peeked", std::vector<int>{});
  phase.num_peeked = static_cast<int>(peeked.size());
  for (std::size_t k = 0; k < peeked.size() && k < 2; ++k) phase.peeked[k] = peeked[k];
  s.state = state_from_layout(config, cells, colours, hints, phase);
  const auto history = j.at("peek_history").get<std::vector<std::vector<int>>>();
  for (std::size_t a = 0; a < history.size(); ++a) {
    for (int card : history[a]) {
      s.state.peek_history[a] |= CardMask{1} << card;
      s.state.team_peeked[card] |= static_cast<std::uint8_t>(1U << a);
    }
  }
  s.seat = j.value("seat", phase.current_player);
  const ActionLayout layout = ActionLayout::of(config);
  const json& labels = j.at("labels");
  for (const json& a : labels.at("t0")) s.t0.push_back(layout.encode(wire::action_from_json(a, layout)));
  for (const json& a : labels.at("t1")) s.t1.push_back(layout.encode(wire::action_from_json(a, layout)));
  for (const json& a : labels.at("wrong")) s.wrong.push_back(layout.encode(wire::action_from_json(a, layout)));
  return s;
}

json scenario_to_json(const DiagnosticScenario& s) {
  const GameConfig& config = s.state.config;
  const ActionLayout layout = ActionLayout::of(config);
  json j;
  j["name"] = s.name;
  j["config"] = {{"variant", std::string(to_string(config.variant))},
                 {"players", config.num_players},
                 {"hint_targets", std::string(to_string(config.hint_target_indexing))}};
  j["cards"] = json::array();
  for (int i = 0; i < config.num_cards; ++i) {
    j["cards"].push_back({{"cell", {s.state.board.positions[i].row, s.state.board.positions[i].col}},
                          {"colour", s.state.board.colours[i]}});
  }
  j["hints"] = json::array();
  for (const HintCard& h : s.state.hints) {
    std::vector<int> colours;
    for (int c = 0; c < config.num_colours; ++c) {
      if ((h.colours >> c) & 1U) colours.push_back(c);
    }
    json hj{{"colours", colours}, {"status", hint_status_name(h.status)}};
    if (h.status == HintStatus::kPlaced) hj["placed_on"] = h.placed_on;
    j["hints"].push_back(hj);
  }
  std::vector<int> peeked(s.state.phase.peeked.begin(), s.state.phase.peeked.begin() + s.state.phase.num_peeked);
  j["phase"] = {{"current_player", s.state.phase.current_player},
                {"substep", std::string(to_string(s.state.phase.substep))},
                {"peeked", peeked}};
  j["peek_history"] = json::array();
  for (int a = 0; a < config.num_players; ++a) {
    std::vector<int> cards;
    for_each_bit(s.state.peek_history[a], [&](int c) { cards.push_back(c); });
    j["peek_history"].push_back(cards);
  }
  j["seat"] = s.seat;
  auto list = [&](const std::vector<int>& ids) {
    json out = json::array();
    for (int k : ids) out.push_back(wire::action_to_json(layout.decode(k)));
    return out;
  };
  j["labels"] = {{"t0", list(s.t0)}, {"t1", list(s.t1)}, {"wrong", list(s.wrong)}};
  return j;
}

std::vector<DiagnosticScenario> load_scenarios(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  const json doc = json::parse(in);
  std::vector<DiagnosticScenario> out;
  for (const json& s : doc.at("scenarios")) {
    out.push_back(scenario_from_json(s));
    validate_scenario(out.back());
  }
  return out;
}

void validate_scenario(const DiagnosticScenario& s) {
  const ActionMask mask = legal_mask(s.state, s.seat);
  std::vector<int> all;
  for (const auto* set : {&s.t0, &s.t1, &s.wrong}) {
    for (int k : *set) {
      if (k < 0 || k >= mask.size() || !mask.test(k)) {
        throw std::invalid_argument(s.name + ": labelled action " + std::to_string(k) + " is not legal");
      }
      all.push_back(k);
    }
  }
  std::sort(all.begin(), all.end());
  if (std::adjacent_find(all.begin(), all.end()) != all.end()) {
    throw std::invalid_argument(s.name + ": label sets overlap");
  }
}

DiagnosticScenario transform_scenario(const DiagnosticScenario& s, const Symmetry& sym) {
  DiagnosticScenario out = s;
  out.state = transform_state(s.state, sym);
  const ActionLayout layout = ActionLayout::of(s.state.config);
  auto map = [&](std::vector<int>& ids) {
    for (int& k : ids) k = layout.encode(transform_action_to_agent(layout.decode(k), sym, layout.grid_side));
  };
  map(out.t0);
  map(out.t1);
  map(out.wrong);
  return out;
}

std::vector<DiagnosticScenario> scenario_variants(const DiagnosticScenario& s, int count, std::uint64_t seed) {
  std::vector<DiagnosticScenario> out;
  if (count <= 0) return out;
  out.push_back(s);
  for (int v = 1; v < count; ++v) {
    const Symmetry sym = sample_symmetries(s.state.config, SymmetryMode::kColourAndRotation,
                                           derive_seed({seed, static_cast<std::uint64_t>(v)}))[0];
    DiagnosticScenario t = transform_scenario(s, sym);
    t.name = s.name + "/" + std::to_string(v);
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<int> action_ranks(const std::vector<double>& probs, const ActionMask& mask) {
  std::vector<int> legal = mask.indices();
  std::stable_sort(legal.begin(), legal.end(), [&](int a, int b) { return probs[a] > probs[b]; });
  std::vector<int> ranks(static_cast<std::size_t>(mask.size()), 0);
  for (std::size_t r = 0; r < legal.size(); ++r) ranks[legal[r]] = static_cast<int>(r) + 1;
  return ranks;
}

DiagnosticResult evaluate_diagnostic(Policy& policy, const std::vector<DiagnosticScenario>& scenarios,
                                     std::uint64_t seed) {
  DiagnosticResult r;
  double sums[3] = {0, 0, 0};
  int counts[3] = {0, 0, 0};
  for (std::size_t i = 0; i < scenarios.size(); ++i) {
    const DiagnosticScenario& s = scenarios[i];
    Rng rng(derive_seed({seed, i}));
    policy.reset({s.state.config, s.seat, i, derive_seed({seed, i})});
    const ObservationSpec spec = policy.observation_spec();
    const ActionMask mask = legal_mask(s.state, s.seat);
    const PolicyOutput out = policy.act(observe(s.state, s.seat, spec.memory, spec.encoding), mask, rng);
    if (out.probs.size() != static_cast<std::size_t>(mask.size())) {
      throw ContractError("diagnostic evaluation needs full probability vectors");
    }
    const std::vector<int> ranks = action_ranks(out.probs, mask);
    const std::vector<int>* sets[3] = {&s.t0, &s.t1, &s.wrong};
    for (int c = 0; c < 3; ++c) {
      if (sets[c]->empty()) continue;
      double mean = 0.0;
      for (int k : *sets[c]) mean += ranks[k];
      sums[c] += mean / sets[c]->size();
      ++counts[c];
    }
  }
  r.scenarios = static_cast<int>(scenarios.size());
  r.t0_rank = counts[0] ? sums[0] / counts[0] : 0.0;
  r.t1_rank = counts[1] ? sums[1] / counts[1] : 0.0;
  r.wrong_rank = counts[2] ? sums[2] / counts[2] : 0.0;
  return r;
}

}  // namespace yle
