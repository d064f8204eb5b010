// Serial vs OpenMP batch stepping, and bitmask vs reachability-matrix move
// legality.
#include <benchmark/benchmark.h>

#include "yle/action_mask.hpp"
#include "yle/vec_env.hpp"

namespace {

using namespace yle;

std::vector<Action> random_joint(const std::vector<InstanceOutput>& outs, int players, Rng& rng,
                                 const GameConfig& config) {
  std::vector<Action> joint;
  joint.reserve(outs.size() * players);
  for (const InstanceOutput& o : outs) {
    for (int a = 0; a < players; ++a) {
      const ActionMask& mask = o.masks[a];
      joint.push_back(decode(mask.nth_set(static_cast<int>(uniform_below(rng, mask.count()))), config));
    }
  }
  return joint;
}

template <bool kParallel>
void BM_BatchStep(benchmark::State& st) {
  BatchConfig cfg;
  cfg.game = GameConfig::make(Variant::k3x3, 2);
  cfg.num_envs = static_cast<int>(st.range(0));
  cfg.master_seed = 1;
  BatchEnv env(cfg);
  std::vector<InstanceOutput> outs = env.reset();
  Rng rng(2);
  for (auto _ : st) {
    st.PauseTiming();
    const std::vector<Action> joint = random_joint(outs, 2, rng, cfg.game);
    st.ResumeTiming();
    outs = kParallel ? env.step(joint) : env.step_serial(joint);
    benchmark::DoNotOptimize(outs.data());
  }
  st.SetItemsProcessed(st.iterations() * cfg.num_envs);
  st.counters["threads"] = max_threads();
}
BENCHMARK(BM_BatchStep<false>)->Name("step/serial")->Arg(512)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BatchStep<true>)->Name("step/openmp")->Arg(512)->Arg(1024)->Arg(2048)->Unit(benchmark::kMillisecond);

std::vector<GameState> sample_states(const GameConfig& config, int count) {
  std::vector<GameState> out;
  Rng rng(3);
  GameState state = new_game(config, rng());
  while (static_cast<int>(out.size()) < count) {
    if (state.phase.terminal) state = new_game(config, rng());
    std::vector<int> legal = legal_mask(state, state.phase.current_player).indices();
    if (legal.size() > 1 && legal.front() == 0) legal.erase(legal.begin());
    step(state, joint_action_for(state, state.phase.current_player,
                                 decode(legal[uniform_below(rng, legal.size())], config)));
    out.push_back(state);
  }
  return out;
}

template <bool kFast>
void BM_MoveTargets(benchmark::State& st) {
  const GameConfig config = GameConfig::make(st.range(0) == 3 ? Variant::k3x3 : Variant::k4x4, 2);
  const std::vector<GameState> states = sample_states(config, 256);
  std::size_t i = 0;
  for (auto _ : st) {
    const BoardState& board = states[i++ % states.size()].board;
    for (int card = 0; card < config.num_cards; ++card) {
      const CellSet cells = kFast ? legal_move_targets_fast(board, card)
                                  : reference::legal_move_targets_reachability(board, card);
      benchmark::DoNotOptimize(cells);
    }
  }
  st.SetItemsProcessed(st.iterations() * config.num_cards);
}
BENCHMARK(BM_MoveTargets<true>)->Name("move_targets/bitmask")->Arg(3)->Arg(4);
BENCHMARK(BM_MoveTargets<false>)->Name("move_targets/reachability")->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
