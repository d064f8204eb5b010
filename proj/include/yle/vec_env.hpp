#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "yle/action_mask.hpp"
#include "yle/game.hpp"
#include "yle/observation.hpp"
#include "yle/reward.hpp"
#include "yle/rng.hpp"

namespace yle {

struct EpisodeMetrics {
  bool won = false;
  bool ended_early = false;
  int score = 0;
  int length = 0;
  int complete_clusters = 0;
  int correct_hints = 0;
  int wrong_hints = 0;
  double terminal_reward = 0.0;
  bool operator==(const EpisodeMetrics&) const = default;
};

EpisodeMetrics episode_metrics(const GameState& terminal_state);

struct BatchConfig {
  GameConfig game;
  int num_envs = 1;
  std::uint64_t master_seed = 0;
  MemoryMode memory = MemoryMode::kStandard;
  Encoding encoding = Encoding::kGraph;
  double shaping_weight = 0.0;
  // Skip observation tensors (masks are always produced).
  bool observations = true;
};

struct StepInfo {
  EventList events;
  // Metrics of the episode that just finished (done == true).
  std::optional<EpisodeMetrics> finished;
  // Reason code when the instance refused the joint action; the instance is
  // left unchanged.
  std::optional<std::string> error;
  bool operator==(const StepInfo&) const = default;
};

struct InstanceOutput {
  std::vector<Observation> observations;  // one per agent
  std::vector<ActionMask> masks;          // one per agent
  double reward = 0.0;                    // shared by all agents
  bool done = false;
  StepInfo info;
  bool operator==(const InstanceOutput&) const = default;
};

// N independent games with auto-reset. Instance i's episode e is seeded with
// derive_seed({master_seed, i, e}). When an episode ends, the returned
// observations and masks already belong to the next episode, and
// info.finished carries the ended episode's metrics.
class BatchEnv {
 public:
  explicit BatchEnv(const BatchConfig& config);

  const BatchConfig& config() const { return config_; }
  int size() const { return config_.num_envs; }
  int num_players() const { return config_.game.num_players; }

  // Resets every instance to episode 0 and returns first outputs.
  std::vector<InstanceOutput> reset();

  // joint_actions holds num_envs x num_players actions, instance-major.
  // Parallel over instances with OpenMP.
  std::vector<InstanceOutput> step(std::span<const Action> joint_actions);
  // Single-threaded reference of step().
  std::vector<InstanceOutput> step_serial(std::span<const Action> joint_actions);

  const GameState& state(int instance) const { return states_[instance]; }
  std::uint64_t episode_counter(int instance) const { return episodes_[instance]; }
  std::uint64_t instance_seed(int instance) const;

 private:
  InstanceOutput step_instance(int instance, std::span<const Action> joint);
  InstanceOutput outputs_for(int instance) const;
  void reset_instance(int instance);

  BatchConfig config_;
  std::vector<GameState> states_;
  std::vector<std::uint64_t> episodes_;
};

struct PhaseActionMix {
  // counts[substep][kind]
  std::array<std::array<std::uint64_t, 6>, 4> counts{};
  PhaseActionMix& operator+=(const PhaseActionMix& other);
  std::uint64_t total() const;
};

struct BenchReport {
  std::string variant;
  int num_players = 0;
  int num_envs = 0;
  int steps = 0;
  bool parallel = true;
  int threads = 1;
  std::uint64_t env_steps = 0;
  double wall_seconds = 0.0;
  double sps = 0.0;        // env steps per second, summed over instances
  double agent_sps = 0.0;  // sps x num_players
  std::uint64_t episodes_finished = 0;
  PhaseActionMix mix;
};

// Runs `steps` uniformly random legal joint steps across num_envs instances.
BenchReport throughput_bench(const GameConfig& config, int num_envs, int steps,
                             std::uint64_t seed, bool parallel = true);

std::string format_bench_table(std::span<const BenchReport> reports);
std::string bench_json(std::span<const BenchReport> reports);

int max_threads();

}  // namespace yle
