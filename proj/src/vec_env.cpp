#include "yle/vec_env.hpp"

#include <chrono>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include <omp.h>

namespace yle {

EpisodeMetrics episode_metrics(const GameState& state) {
  if (!state.phase.terminal || !state.phase.outcome) {
    throw ContractError("episode_metrics needs a terminal state");
  }
  EpisodeMetrics m;
  m.won = state.phase.outcome->won;
  m.ended_early = state.phase.ended_early;
  m.score = state.phase.outcome->score;
  m.length = state.step_count;
  m.complete_clusters = count_complete_colour_clusters(state);
  m.correct_hints = count_correct_hints(state);
  m.wrong_hints = count_wrong_hints(state);
  m.terminal_reward = terminal_reward(state);
  return m;
}

BatchEnv::BatchEnv(const BatchConfig& config) : config_(config) {
  if (config.num_envs < 1) throw std::invalid_argument("num_envs must be >= 1");
  if (config.shaping_weight < 0.0) throw std::invalid_argument("shaping weight must be >= 0");
  config_.game.validate();
  states_.resize(config.num_envs);
  episodes_.assign(config.num_envs, 0);
  for (int i = 0; i < config.num_envs; ++i) reset_instance(i);
}

std::uint64_t BatchEnv::instance_seed(int instance) const {
  return derive_seed({config_.master_seed, static_cast<std::uint64_t>(instance), episodes_[instance]});
}

void BatchEnv::reset_instance(int instance) {
  states_[instance] = new_game(config_.game, instance_seed(instance));
}

InstanceOutput BatchEnv::outputs_for(int instance) const {
  const GameState& state = states_[instance];
  InstanceOutput out;
  const int n = config_.game.num_players;
  out.masks.reserve(n);
  for (int agent = 0; agent < n; ++agent) out.masks.push_back(legal_mask(state, agent));
  if (config_.observations) {
    out.observations.reserve(n);
    for (int agent = 0; agent < n; ++agent) {
      out.observations.push_back(observe(state, agent, config_.memory, config_.encoding));
    }
  }
  return out;
}

std::vector<InstanceOutput> BatchEnv::reset() {
  std::vector<InstanceOutput> out(config_.num_envs);
  for (int i = 0; i < config_.num_envs; ++i) {
    episodes_[i] = 0;
    reset_instance(i);
    out[i] = outputs_for(i);
  }
  return out;
}

InstanceOutput BatchEnv::step_instance(int instance, std::span<const Action> joint) {
  GameState& state = states_[instance];
  StepInfo info;
  double reward = 0.0;
  bool done = false;
  try {
    info.events = yle::step(state, joint);
    reward = step_reward(state, info.events, config_.shaping_weight).total;
    if (state.phase.terminal) {
      done = true;
      info.finished = episode_metrics(state);
      ++episodes_[instance];
      reset_instance(instance);
    }
  } catch (const IllegalAction& e) {
    info.error = std::string(reason_code(e.reason()));
  }
  InstanceOutput out = outputs_for(instance);
  out.reward = reward;
  out.done = done;
  out.info = std::move(info);
  return out;
}

namespace {

void check_joint_size(std::span<const Action> joint_actions, int envs, int players) {
  if (joint_actions.size() != static_cast<std::size_t>(envs) * players) {
    throw std::invalid_argument("joint action batch has the wrong size");
  }
}

}  // namespace

std::vector<InstanceOutput> BatchEnv::step(std::span<const Action> joint_actions) {
  const int n = config_.num_envs;
  const int p = config_.game.num_players;
  check_joint_size(joint_actions, n, p);
  std::vector<InstanceOutput> out(n);
#pragma omp parallel for schedule(static)
  for (int i = 0; i < n; ++i) {
    out[i] = step_instance(i, joint_actions.subspan(static_cast<std::size_t>(i) * p, p));
  }
  return out;
}

std::vector<InstanceOutput> BatchEnv::step_serial(std::span<const Action> joint_actions) {
  const int n = config_.num_envs;
  const int p = config_.game.num_players;
  check_joint_size(joint_actions, n, p);
  std::vector<InstanceOutput> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = step_instance(i, joint_actions.subspan(static_cast<std::size_t>(i) * p, p));
  }
  return out;
}

PhaseActionMix& PhaseActionMix::operator+=(const PhaseActionMix& other) {
  for (int s = 0; s < 4; ++s) {
    for (int k = 0; k < 6; ++k) counts[s][k] += other.counts[s][k];
  }
  return *this;
}

std::uint64_t PhaseActionMix::total() const {
  std::uint64_t t = 0;
  for (const auto& row : counts) {
    for (std::uint64_t c : row) t += c;
  }
  return t;
}

int max_threads() { return omp_get_max_threads(); }

BenchReport throughput_bench(const GameConfig& config, int num_envs, int steps,
                             std::uint64_t seed, bool parallel) {
  if (num_envs < 1) throw std::invalid_argument("num_envs must be >= 1");
  BenchReport report;
  report.variant = std::string(to_string(config.variant));
  report.num_players = config.num_players;
  report.num_envs = num_envs;
  report.steps = steps;
  report.parallel = parallel;
  report.threads = parallel ? omp_get_max_threads() : 1;
  if (steps <= 0) return report;

  BatchConfig batch;
  batch.game = config;
  batch.num_envs = num_envs;
  batch.master_seed = seed;
  BatchEnv env(batch);
  std::vector<InstanceOutput> outputs = env.reset();
  std::vector<Rng> rngs;
  rngs.reserve(num_envs);
  for (int i = 0; i < num_envs; ++i) rngs.emplace_back(derive_seed({seed, static_cast<std::uint64_t>(i), 0x62656e6368ULL}));
  const int p = config.num_players;
  const ActionLayout layout = ActionLayout::of(config);
  std::vector<Action> joint(static_cast<std::size_t>(num_envs) * p);

  const auto start = std::chrono::steady_clock::now();
  for (int t = 0; t < steps; ++t) {
    for (int i = 0; i < num_envs; ++i) {
      const GameState& state = env.state(i);
      const int actor = state.phase.current_player;
      const ActionMask& mask = outputs[i].masks[actor];
      const int pick = mask.nth_set(static_cast<int>(uniform_below(rngs[i], mask.count())));
      const Action a = layout.decode(pick);
      for (int agent = 0; agent < p; ++agent) joint[static_cast<std::size_t>(i) * p + agent] = Action::no_op();
      joint[static_cast<std::size_t>(i) * p + actor] = a;
      ++report.mix.counts[static_cast<int>(state.phase.substep)][static_cast<int>(a.kind)];
    }
    outputs = parallel ? env.step(joint) : env.step_serial(joint);
    for (const InstanceOutput& o : outputs) report.episodes_finished += o.done;
  }
  report.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  report.env_steps = static_cast<std::uint64_t>(num_envs) * steps;
  report.sps = report.wall_seconds > 0 ? report.env_steps / report.wall_seconds : 0.0;
  report.agent_sps = report.sps * p;
  return report;
}

namespace {

const char* kSubstepNames[4] = {"peek1", "peek2", "move", "hint"};
const char* kKindNames[6] = {"noop", "end_game", "observe", "move", "reveal", "place"};

std::string with_commas(double value) {
  std::string digits = std::to_string(static_cast<long long>(value + 0.5));
  for (int i = static_cast<int>(digits.size()) - 3; i > 0; i -= 3) digits.insert(i, ",");
  return digits;
}

}  // namespace

std::string format_bench_table(std::span<const BenchReport> reports) {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-14s %-8s %8s %8s %14s %10s %8s\n", "config", "mode",
                "envs", "steps", "SPS", "wall[s]", "threads");
  os << line;
  for (const BenchReport& r : reports) {
    const std::string name = std::to_string(r.num_players) + "-player " + r.variant;
    std::snprintf(line, sizeof line, "%-14s %-8s %8d %8d %14s %10.3f %8d\n", name.c_str(),
                  r.parallel ? "openmp" : "serial", r.num_envs, r.steps,
                  with_commas(r.sps).c_str(), r.wall_seconds, r.threads);
    os << line;
  }
  if (!reports.empty()) {
    PhaseActionMix mix;
    for (const BenchReport& r : reports) mix += r.mix;
    const double total = static_cast<double>(std::max<std::uint64_t>(mix.total(), 1));
    os << "\naction mix (% of all actions)\n";
    std::snprintf(line, sizeof line, "%-7s", "");
    os << line;
    for (const char* k : kKindNames) {
      std::snprintf(line, sizeof line, " %9s", k);
      os << line;
    }
    os << '\n';
    for (int s = 0; s < 4; ++s) {
      std::snprintf(line, sizeof line, "%-7s", kSubstepNames[s]);
      os << line;
      for (int k = 0; k < 6; ++k) {
        std::snprintf(line, sizeof line, " %9.2f", 100.0 * mix.counts[s][k] / total);
        os << line;
      }
      os << '\n';
    }
  }
  return os.str();
}

std::string bench_json(std::span<const BenchReport> reports) {
  nlohmann::json doc;
  doc["schema"] = "yle-bench/1";
  doc["runs"] = nlohmann::json::array();
  for (const BenchReport& r : reports) {
    nlohmann::json run = {{"variant", r.variant},
                          {"players", r.num_players},
                          {"envs", r.num_envs},
                          {"steps", r.steps},
                          {"mode", r.parallel ? "openmp" : "serial"},
                          {"threads", r.threads},
                          {"env_steps", r.env_steps},
                          {"wall_seconds", r.wall_seconds},
                          {"sps", r.sps},
                          {"agent_sps", r.agent_sps},
                          {"episodes_finished", r.episodes_finished}};
    nlohmann::json mix = nlohmann::json::object();
    for (int s = 0; s < 4; ++s) {
      for (int k = 0; k < 6; ++k) {
        if (r.mix.counts[s][k] != 0) mix[kSubstepNames[s]][kKindNames[k]] = r.mix.counts[s][k];
      }
    }
    run["action_mix"] = mix;
    doc["runs"].push_back(run);
  }
  return doc.dump(2);
}

}  // namespace yle
