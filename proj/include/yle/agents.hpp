#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "yle/action.hpp"
#include "yle/action_mask.hpp"
#include "yle/config.hpp"
#include "yle/observation.hpp"
#include "yle/rng.hpp"

namespace yle {

struct EpisodeContext {
  GameConfig config;
  int seat = 0;
  std::uint64_t episode = 0;
  std::uint64_t seed = 0;
};

struct ObservationSpec {
  MemoryMode memory = MemoryMode::kStandard;
  Encoding encoding = Encoding::kGraph;
};

struct PolicyOutput {
  int action = -1;
  // Full distribution over the action layout, zero on masked entries. Empty
  // when the policy does not report probabilities.
  std::vector<double> probs;
};

class PolicyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  // Policies that work in either memory mode use the requested one.
  virtual ObservationSpec observation_spec() const { return {memory_, Encoding::kGraph}; }
  void request_memory(MemoryMode memory) { memory_ = memory; }
  virtual void reset(const EpisodeContext& context) { context_ = context; }
  virtual PolicyOutput act(const Observation& obs, const ActionMask& mask, Rng& rng) = 0;
  // Called when an episode finishes or is aborted.
  virtual void on_episode_end(bool /*aborted*/) {}

 protected:
  EpisodeContext context_;
  MemoryMode memory_ = MemoryMode::kStandard;
};

std::vector<double> one_hot(int size, int index);
std::vector<double> uniform_over(const ActionMask& mask);

class RandomPolicy final : public Policy {
 public:
  std::string name() const override { return "random"; }
  PolicyOutput act(const Observation& obs, const ActionMask& mask, Rng& rng) override;
};

// What one seat knows, decoded from its Perfect-memory graph observation.
struct AgentView {
  int num_cards = 0;
  int num_colours = 0;
  int grid_side = 0;
  int block_side = 0;
  std::array<Cell, kMaxCards> positions{};
  CardMask locked = 0;
  std::array<int, kMaxCards> known{};  // colour or -1
  struct Hint {
    ColourMask colours = 0;
    HintStatus status = HintStatus::kFaceDown;
    int placed_on = kNoCard;
  };
  std::vector<Hint> hints;
  Substep substep = Substep::kPeek1;
  bool is_current = false;

  int known_count() const;
};

AgentView decode_view(const Observation& graph_obs);

// Sum over colours of the largest connected group of known cards of that
// colour, with card `moved` placed at `to` (kNoCard for the current board).
int known_cluster_score(const AgentView& view, int moved = kNoCard, Cell to = {});

// True if every colouring of the unknown cards consistent with the colour
// counts and placed hints is a win. False when `node_cap` assignments are
// exhausted without a proof.
bool proves_win(const AgentView& view, long node_cap = 200000);

// Priority policy on Perfect-memory graph observations:
//   EndGame when its knowledge proves a win, peek the lowest never-self-peeked
//   unlocked card, make the move that most improves known clusters, place a
//   revealed hint on a known match or reveal the next face-down hint.
class GreedyPolicy : public Policy {
 public:
  std::string name() const override { return "greedy"; }
  ObservationSpec observation_spec() const override { return {MemoryMode::kPerfect, Encoding::kGraph}; }
  PolicyOutput act(const Observation& obs, const ActionMask& mask, Rng& rng) override;

  const AgentView& last_view() const { return view_; }

 protected:
  int choose(const ActionMask& mask);
  int choose_peek(const ActionMask& mask) const;
  int choose_move(const ActionMask& mask) const;
  int choose_hint(const ActionMask& mask) const;

  AgentView view_;
};

// Always peeks novel cards first and recalls every peek; exposes its
// knowledge for probing labels.
class MemoryOraclePolicy final : public GreedyPolicy {
 public:
  std::string name() const override { return "oracle"; }
  // Per card: known colour or -1, as of the last act() call.
  std::vector<int> knowledge() const;
};

}  // namespace yle
