// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when a
// blocking criterion fails.
#include <chrono>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <thread>

#include "oracle.hpp"
#include "yle/harness.hpp"
#include "yle/reward.hpp"
#include "yle/vec_env.hpp"

namespace yle {
namespace {

struct Verdict {
  bool pass = true;
  std::string detail;
  void fail(const std::string& why) {
    if (pass) detail = why;
    pass = false;
  }
};

int blocking_failures = 0;

void report(const char* name, const std::function<Verdict()>& body, bool blocking = true) {
  const auto t0 = std::chrono::steady_clock::now();
  Verdict v;
  try {
    v = body();
  } catch (const std::exception& e) {
    v.fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (!v.pass && blocking) ++blocking_failures;
  std::printf("%s %-28s %s (%.1fs)%s\n", v.pass ? "PASS" : "FAIL", name, v.detail.c_str(), secs,
              !v.pass && !blocking ? " [non-blocking]" : "");
  std::fflush(stdout);
}

std::string fmt(const char* format, double a = 0, double b = 0, double c = 0, double d = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, format, a, b, c, d);
  return buf;
}

void play(GameState& state, const Action& a) { step(state, joint_action_for(state, state.phase.current_player, a)); }

// ---------------------------------------------------------------------------

Verdict rules_oracle() {
  Verdict v;
  long target_checks = 0, reach_checks = 0, win_checks = 0;
  for (Variant variant : {Variant::k3x3, Variant::k4x4}) {
    const GameConfig config = GameConfig::make(variant, 2);
    Rng rng(variant == Variant::k3x3 ? 101 : 202);
    for (int trial = 0; trial < 1000; ++trial) {
      const GameState state = oracle::random_reachable_state(config, rng);
      for (int card = 0; card < config.num_cards; ++card) {
        const std::set<Cell> expected = oracle::legal_targets(state, card);
        const CellSet reach = reference::legal_move_targets_reachability(state.board, card);
        std::set<Cell> from_reach;
        for (int i = 0; i < config.grid_cells(); ++i) {
          if (reach.test(i)) from_reach.insert(state.board.cell_at(i));
        }
        ++reach_checks;
        if (from_reach != expected) v.fail("flood-fill oracle differs from the reachability matrix");
        if (state.board.is_locked(card)) continue;
        const CellSet got = legal_move_targets(state, card);
        std::set<Cell> engine;
        for (int i = 0; i < config.grid_cells(); ++i) {
          if (got.test(i)) engine.insert(state.board.cell_at(i));
        }
        ++target_checks;
        if (engine != expected) v.fail("legal_move_targets differs from the oracle");
      }
      ++win_checks;
      if (check_win(state) != oracle::win(state)) v.fail("check_win differs from the oracle");
      const GameState shaped = oracle::random_connected_board(config, rng);
      ++win_checks;
      if (check_win(shaped) != oracle::win(shaped)) v.fail("check_win differs on a random polyomino");
    }
  }
  if (v.pass) {
    v.detail = fmt("2x1000 states, %.0f target sets, %.0f reachability sets, %.0f win checks, 0 mismatches",
                   target_checks, reach_checks, win_checks);
  }
  return v;
}

// ---------------------------------------------------------------------------

const GameConfig kConfig3 = GameConfig::make(Variant::k3x3, 2);

std::vector<Cell> block_cells() {
  std::vector<Cell> cells;
  for (int i = 0; i < 9; ++i) cells.push_back(start_cell(kConfig3, i));
  return cells;
}

HintCard hint(int id, ColourMask colours, HintStatus status = HintStatus::kFaceDown, int on = kNoCard) {
  HintCard h;
  h.id = id;
  h.colours = colours;
  h.status = status;
  h.placed_on = on;
  return h;
}

TurnPhase terminal_phase(bool won, bool early) {
  TurnPhase p;
  p.terminal = true;
  p.ended_early = early;
  p.outcome = Outcome{won, 0};
  return p;
}

Verdict score_goldens() {
  Verdict v;
  const std::vector<std::uint8_t> rows = {0, 0, 0, 1, 1, 1, 2, 2, 2};
  auto expect = [&](const char* what, double got, double want) {
    if (got != want) v.fail(std::string(what) + ": got " + std::to_string(got) + ", want " + std::to_string(want));
  };

  // End at turn 1, all four hints face down, everything clustered.
  {
    std::vector<HintCard> deck = {hint(0, 0b001), hint(1, 0b011), hint(2, 0b110), hint(3, 0b101)};
    GameState s = state_from_layout(kConfig3, block_cells(), rows, deck, TurnPhase{});
    play(s, Action::end_game());
    expect("end at turn 1 won", s.phase.outcome && s.phase.outcome->won, 1);
    expect("end at turn 1 score", compute_score(s), 20);
    expect("end at turn 1 reward", terminal_reward(s), 20);
  }
  // 1 face-down, 1 revealed, 2 placed correct.
  {
    std::vector<HintCard> deck = {hint(0, 0b001), hint(1, 0b011, HintStatus::kRevealed),
                                  hint(2, 0b110, HintStatus::kPlaced, 3), hint(3, 0b101, HintStatus::kPlaced, 6)};
    GameState s = state_from_layout(kConfig3, block_cells(), rows, deck, TurnPhase{});
    play(s, Action::end_game());
    expect("5+2+2-0", compute_score(s), 9);
    expect("won with S=9 reward", terminal_reward(s), 9);
  }
  // All four placed, 3 correct and 1 wrong.
  {
    std::vector<HintCard> deck = {hint(0, 0b001, HintStatus::kPlaced, 0), hint(1, 0b011, HintStatus::kPlaced, 3),
                                  hint(2, 0b110, HintStatus::kPlaced, 4), hint(3, 0b011, HintStatus::kPlaced, 8)};
    const GameState s = state_from_layout(kConfig3, block_cells(), rows, deck, terminal_phase(true, false));
    expect("0+0+3-1", compute_score(s), 2);
  }
  // Losses: ended early, one complete cluster, one wrong hint.
  {
    const std::vector<std::uint8_t> one_complete = {0, 0, 0, 1, 2, 1, 2, 1, 2};
    std::vector<HintCard> deck = {hint(0, 0b010, HintStatus::kPlaced, 0), hint(1, 0b011), hint(2, 0b110),
                                  hint(3, 0b101)};
    const GameState s = state_from_layout(kConfig3, block_cells(), one_complete, deck, terminal_phase(false, true));
    expect("loss -1-2-1", terminal_reward(s), -4);
  }
  {
    const std::vector<std::uint8_t> two_complete = {0, 1, 2, 0, 1, 1, 0, 2, 2};
    std::vector<HintCard> deck = {hint(0, 0b001), hint(1, 0b011), hint(2, 0b110), hint(3, 0b101)};
    const GameState s = state_from_layout(kConfig3, block_cells(), two_complete, deck, terminal_phase(false, false));
    expect("loss c_a=2", terminal_reward(s), -1);
  }
  if (v.pass) v.detail = "20, 9, 2, -4, -1 and +9 reproduced exactly";
  return v;
}

// ---------------------------------------------------------------------------

Verdict structural_constants() {
  Verdict v;
  if (action_count(kConfig3) != 1068) v.fail("action count " + std::to_string(action_count(kConfig3)));
  if (kConfig3.max_episode_length() != 32) v.fail("max episode length");
  // one/two/three-colour counts per (variant, players).
  const int table[2][3][3] = {{{1, 3, 0}, {2, 3, 0}, {3, 3, 0}}, {{2, 3, 2}, {2, 4, 3}, {3, 4, 3}}};
  for (int vi = 0; vi < 2; ++vi) {
    for (int p = 2; p <= 4; ++p) {
      const Variant variant = vi == 0 ? Variant::k3x3 : Variant::k4x4;
      const HintDeckSpec spec = standard_hint_deck(variant, p);
      const int* want = table[vi][p - 2];
      if (spec.one_colour != want[0] || spec.two_colour != want[1] || spec.three_colour != want[2]) {
        v.fail("hint deck for " + std::string(to_string(variant)) + "/" + std::to_string(p));
      }
      // Drawn decks realise the table.
      const GameConfig config = GameConfig::make(variant, p);
      const std::vector<HintCard> deck = draw_hint_deck(config, 9);
      int sizes[4] = {0, 0, 0, 0};
      for (const HintCard& h : deck) ++sizes[std::popcount(static_cast<unsigned>(h.colours))];
      if (sizes[1] != want[0] || sizes[2] != want[1] || sizes[3] != want[2]) v.fail("drawn deck sizes");
    }
  }
  if (v.pass) v.detail = "1068 actions, length bound 32, 6/6 hint deck cells";
  return v;
}

// ---------------------------------------------------------------------------

Verdict mask_sweep() {
  Verdict v;
  long checked = 0;
  Rng rng(303);
  for (Variant variant : {Variant::k3x3, Variant::k4x4}) {
    for (int players = 2; players <= 4; ++players) {
      const GameConfig config = GameConfig::make(variant, players);
      const ActionLayout layout = ActionLayout::of(config);
      for (int trial = 0; trial < 100; ++trial) {
        const GameState state = oracle::random_reachable_state(config, rng);
        for (int agent = 0; agent < players; ++agent) {
          const ActionMask mask = legal_mask(state, agent);
          for (int k = 0; k < layout.size; ++k) {
            const Action a = layout.decode(k);
            bool accepted = true;
            if (agent == state.phase.current_player) {
              try {
                apply_action(state, joint_action_for(state, agent, a));
              } catch (const IllegalAction&) {
                accepted = false;
              }
            } else {
              try {
                validate_action(state, agent, a);
              } catch (const IllegalAction&) {
                accepted = false;
              }
            }
            ++checked;
            if (accepted != mask.test(k)) {
              v.fail("index " + std::to_string(k) + " mask " + std::to_string(mask.test(k)) + " engine " +
                     std::to_string(accepted));
            }
          }
        }
      }
    }
  }
  if (v.pass) v.detail = fmt("6 configs x 100 states, %.0f (state, agent, action) checks, 0 violations", checked);
  return v;
}

// ---------------------------------------------------------------------------

Verdict replay() {
  Verdict v;
  const PolicyFactory random = [] { return std::make_unique<RandomPolicy>(); };
  const MatchResult result = run_matchup({random, random}, kConfig3, 100, 404);
  std::stringstream buffer;
  write_jsonl(buffer, result.records);
  const std::vector<EpisodeRecord> back = read_jsonl(buffer);
  if (back != result.records) v.fail("JSONL round trip changed a record");
  for (const EpisodeRecord& r : back) {
    const ReplayResult rr = replay_episode(r);
    if (!rr.ok) v.fail("episode " + std::to_string(r.episode) + ": " + rr.mismatch);
  }
  // Same seed, same records.
  if (run_matchup({random, random}, kConfig3, 100, 404).records != result.records) v.fail("rerun differs");
  if (v.pass) v.detail = "100 episodes re-simulated bit-exactly";
  return v;
}

// ---------------------------------------------------------------------------

bool commuting_square(const GameConfig& config, std::uint64_t seed, std::string& why) {
  Rng rng(seed);
  GameState real = new_game(config, rng());
  const std::vector<Symmetry> syms = sample_symmetries(config, SymmetryMode::kColourAndRotation, rng());
  std::vector<GameState> shadows;
  for (const Symmetry& s : syms) shadows.push_back(transform_state(real, s));
  const ActionLayout layout = ActionLayout::of(config);
  while (!real.phase.terminal) {
    const int actor = real.phase.current_player;
    const Symmetry& sym = syms[actor];
    const ActionMask agent_mask = transform_mask_to_agent(legal_mask(real, actor), layout, sym);
    if (agent_mask != legal_mask(shadows[actor], actor)) return why = "mask", false;
    std::vector<int> legal = agent_mask.indices();
    if (legal.size() > 1 && legal.front() == 0 && uniform_below(rng, 20) != 0) legal.erase(legal.begin());
    const Action chosen = layout.decode(legal[uniform_below(rng, legal.size())]);
    const Action env = transform_action_to_env(chosen, sym, config.grid_side);
    step(real, joint_action_for(real, actor, env));
    for (std::size_t i = 0; i < syms.size(); ++i) {
      const int agent = static_cast<int>(i);
      step(shadows[i], joint_action_for(shadows[i], actor, transform_action_to_agent(env, syms[i], config.grid_side)));
      if (shadows[i] != transform_state(real, syms[i])) return why = "state", false;
      for (Encoding enc : {Encoding::kGraph, Encoding::kImage}) {
        for (MemoryMode mode : {MemoryMode::kStandard, MemoryMode::kPerfect}) {
          if (observe(shadows[i], agent, mode, enc) != transform_observation(observe(real, agent, mode, enc), syms[i])) {
            return why = "observation", false;
          }
        }
      }
    }
  }
  for (const GameState& s : shadows) {
    if (s.phase.outcome != real.phase.outcome || s.step_count != real.step_count) return why = "outcome", false;
  }
  return true;
}

Verdict symmetry_square() {
  Verdict v;
  for (int episode = 0; episode < 1000; ++episode) {
    const GameConfig config = GameConfig::make(episode % 2 ? Variant::k4x4 : Variant::k3x3, 2 + episode % 3,
                                               episode % 4 < 2 ? HintTargetIndexing::kCell : HintTargetIndexing::kCard);
    std::string why;
    if (!commuting_square(config, 5000 + episode, why)) v.fail("episode " + std::to_string(episode) + ": " + why);
  }
  if (v.pass) v.detail = "1000 episodes, masks/states/observations/outcomes commute";
  return v;
}

// ---------------------------------------------------------------------------

Verdict privacy() {
  Verdict v;
  Rng rng(505);
  int trials = 0, attempts = 0;
  while (trials < 100 && attempts < 1000) {
    ++attempts;
    const GameConfig config = GameConfig::make(attempts % 2 ? Variant::k4x4 : Variant::k3x3, 2 + attempts % 3);
    const GameState start = new_game(config, rng());
    const int observer = static_cast<int>(uniform_below(rng, config.num_players));
    GameState state = start;
    std::vector<Action> actions;
    while (!state.phase.terminal) {
      actions.push_back(oracle::random_action_no_end(state, rng));
      play(state, actions.back());
    }
    std::vector<int> hidden;
    for (int i = 0; i < config.num_cards; ++i) {
      bool covered = false;
      for (const HintCard& h : state.hints) covered |= h.status == HintStatus::kPlaced && h.placed_on == i;
      if (!((state.peek_history[observer] >> i) & 1U) && !covered) hidden.push_back(i);
    }
    int a = -1, b = -1;
    for (int x : hidden) {
      for (int y : hidden) {
        if (start.board.colours[x] != start.board.colours[y]) a = x, b = y;
      }
    }
    if (a < 0) continue;
    GameState real = start, counter = start;
    std::swap(counter.board.colours[a], counter.board.colours[b]);
    counter.board.rebuild_derived();
    auto same = [&] {
      for (MemoryMode mode : {MemoryMode::kStandard, MemoryMode::kPerfect}) {
        for (Encoding enc : {Encoding::kGraph, Encoding::kImage}) {
          if (observe(real, observer, mode, enc) != observe(counter, observer, mode, enc)) return false;
        }
      }
      return true;
    };
    bool ok = same();
    for (const Action& action : actions) {
      play(real, action);
      play(counter, action);
      ok &= same();
    }
    if (!ok) v.fail("observation stream changed in trial " + std::to_string(trials));
    ++trials;
  }
  if (trials < 100) v.fail("only " + std::to_string(trials) + " usable trials");
  if (v.pass) v.detail = "100 trials, observation streams identical";
  return v;
}

// ---------------------------------------------------------------------------

Verdict throughput() {
  Verdict v;
  std::vector<BenchReport> reports;
  for (int n : {512, 1024, 2048}) reports.push_back(throughput_bench(kConfig3, n, 1000, 606, true));
  std::printf("%s", format_bench_table(reports).c_str());
  const unsigned cores = std::thread::hardware_concurrency();
  if (cores >= 4) {
    if (reports[1].sps < reports[0].sps) v.fail(fmt("SPS(1024) %.0f < SPS(512) %.0f", reports[1].sps, reports[0].sps));
    if (v.pass) v.detail = fmt("report emitted; SPS(1024) %.0f >= SPS(512) %.0f", reports[1].sps, reports[0].sps);
  } else {
    v.detail = fmt("report emitted; SPS ordering needs >= 4 cores, host has %.0f (not evaluated)", cores);
  }
  return v;
}

// ---------------------------------------------------------------------------

// Records the oracle's known-card count after every decision.
class KnowledgeProbe final : public Policy {
 public:
  std::string name() const override { return "oracle"; }
  ObservationSpec observation_spec() const override { return inner_.observation_spec(); }
  void reset(const EpisodeContext& c) override {
    inner_.reset(c);
    last_ = 0;
  }
  PolicyOutput act(const Observation& obs, const ActionMask& mask, Rng& rng) override {
    PolicyOutput out = inner_.act(obs, mask, rng);
    int known = 0;
    for (int c : inner_.knowledge()) known += c >= 0;
    if (known < last_) ++drops;
    last_ = known;
    ++samples;
    return out;
  }
  long drops = 0, samples = 0;

 private:
  MemoryOraclePolicy inner_;
  int last_ = 0;
};

Verdict behaviour() {
  Verdict v;
  const PolicyFactory random = [] { return std::make_unique<RandomPolicy>(); };
  const PolicyFactory greedy = [] { return std::make_unique<GreedyPolicy>(); };
  const Metrics rr = run_matchup({random, random}, kConfig3, 1000, 7).metrics;
  const Metrics gg = run_matchup({greedy, greedy}, kConfig3, 1000, 7).metrics;
  KnowledgeProbe a, b;
  const Metrics oo = run_matchup(std::vector<Policy*>{&a, &b}, kConfig3, 1000, 7).metrics;
  if (!(rr.success_rate < 0.01)) v.fail(fmt("random SR %.3f", rr.success_rate));
  if (!(gg.success_rate > rr.success_rate)) v.fail("greedy SR not above random");
  if (!(gg.successful_early_end > 0)) v.fail("greedy SEE is zero");
  if (a.drops + b.drops != 0) v.fail("oracle knowledge decreased");
  if (v.pass) {
    v.detail = fmt("random SR %.3f; greedy SR %.3f SEE %.3f; oracle knowledge monotone over %.0f decisions",
                   rr.success_rate, gg.success_rate, gg.successful_early_end, double(a.samples + b.samples));
  }
  (void)oo;
  return v;
}

// ---------------------------------------------------------------------------

class JitteredUniform final : public Policy {
 public:
  std::string name() const override { return "uniform"; }
  PolicyOutput act(const Observation&, const ActionMask& mask, Rng& rng) override {
    std::vector<double> probs(mask.size(), 0.0);
    std::uniform_real_distribution<double> jitter(0.0, 1e-6);
    double total = 0.0;
    for (int k : mask.indices()) total += probs[k] = 1.0 + jitter(rng);
    for (double& p : probs) p /= total;
    return {mask.indices().front(), probs};
  }
};

class Rescaled final : public Policy {
 public:
  Rescaled(Policy& inner, double (*f)(double)) : inner_(inner), f_(f) {}
  std::string name() const override { return "rescaled"; }
  ObservationSpec observation_spec() const override { return inner_.observation_spec(); }
  void reset(const EpisodeContext& c) override { inner_.reset(c); }
  PolicyOutput act(const Observation& obs, const ActionMask& mask, Rng& rng) override {
    PolicyOutput out = inner_.act(obs, mask, rng);
    for (double& p : out.probs) p = f_(p);
    return out;
  }

 private:
  Policy& inner_;
  double (*f_)(double);
};

Verdict diagnostic() {
  Verdict v;
  std::vector<DiagnosticScenario> scenarios;
  for (const DiagnosticScenario& s : load_scenarios(std::string(YLE_FIXTURE_DIR) + "/diagnostic_scenarios.json")) {
    for (DiagnosticScenario& x : scenario_variants(s, 16, 707)) scenarios.push_back(std::move(x));
  }
  double expect = 0.0;
  for (const DiagnosticScenario& s : scenarios) expect += (legal_mask(s.state, s.seat).count() + 1) / 2.0;
  expect /= static_cast<double>(scenarios.size());
  JitteredUniform uniform;
  const int trials = 1000;
  double sums[3] = {0, 0, 0};
  for (int t = 0; t < trials; ++t) {
    const DiagnosticResult r = evaluate_diagnostic(uniform, scenarios, static_cast<std::uint64_t>(t));
    sums[0] += r.t0_rank;
    sums[1] += r.t1_rank;
    sums[2] += r.wrong_rank;
  }
  for (double& s : sums) {
    s /= trials;
    if (std::abs(s - expect) > 0.03 * expect) v.fail(fmt("uniform mean rank %.2f vs %.2f", s, expect));
  }
  GreedyPolicy greedy;
  for (Policy* inner : std::vector<Policy*>{&uniform, &greedy}) {
    const DiagnosticResult base = evaluate_diagnostic(*inner, scenarios, 1);
    Rescaled root(*inner, [](double p) { return std::sqrt(p); });
    Rescaled cube(*inner, [](double p) { return p * p * p; });
    for (Policy* p : std::vector<Policy*>{&root, &cube}) {
      const DiagnosticResult r = evaluate_diagnostic(*p, scenarios, 1);
      if (r.t0_rank != base.t0_rank || r.t1_rank != base.t1_rank || r.wrong_rank != base.wrong_rank) {
        v.fail("ranks changed under a monotone rescaling");
      }
    }
  }
  if (v.pass) {
    v.detail = fmt("(m+1)/2 = %.2f; uniform T0 %.2f T1 %.2f wrong %.2f; rescaling exact", expect, sums[0], sums[1],
                   sums[2]);
  }
  return v;
}

// ---------------------------------------------------------------------------

Verdict border_probe() {
  Verdict v;
  const PolicyFactory greedy = [] { return std::make_unique<GreedyPolicy>(); };
  const MatchResult result = run_matchup({greedy, greedy}, kConfig3, 1000, 808);
  const double rate = border_move_rate(result.records);
  v.detail = fmt("greedy self-play border move rate %.4f", rate);
  if (!(rate < 0.05)) v.fail(v.detail);
  return v;
}

}  // namespace
}  // namespace yle

int main() {
  using namespace yle;
  report("rules-oracle-equivalence", rules_oracle);
  report("score-reward-goldens", score_goldens);
  report("structural-constants", structural_constants);
  report("mask-engine-agreement", mask_sweep);
  report("determinism-replay", replay);
  report("symmetry-commuting-square", symmetry_square);
  report("privacy-recolouring", privacy);
  report("throughput-harness", throughput);
  report("behavioural-orderings", behaviour);
  report("diagnostic-machinery", diagnostic);
  report("border-usage-probe", border_probe, false);
  return blocking_failures == 0 ? 0 : 1;
}
