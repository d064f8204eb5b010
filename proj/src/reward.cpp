#include "yle/reward.hpp"

#include <stdexcept>

namespace yle {

ShapedCounts& ShapedCounts::operator+=(const ShapedCounts& other) {
  new_card_peek += other.new_card_peek;
  cluster_max_increase += other.cluster_max_increase;
  hint_correct += other.hint_correct;
  hint_wrong += other.hint_wrong;
  return *this;
}

ShapedCounts count_shaping_events(const EventList& events) {
  ShapedCounts counts;
  for (const Event& e : events) {
    switch (e.kind) {
      case EventKind::kPeekedNewTeamCard: ++counts.new_card_peek; break;
      case EventKind::kClusterCountIncreasedBeyondMax: ++counts.cluster_max_increase; break;
      case EventKind::kHintPlacedCorrect: ++counts.hint_correct; break;
      case EventKind::kHintPlacedWrong: ++counts.hint_wrong; break;
      case EventKind::kGameEnded: break;
    }
  }
  return counts;
}

double terminal_reward(const GameState& state) {
  if (!state.phase.terminal || !state.phase.outcome) {
    throw ContractError("terminal_reward needs a terminal state");
  }
  if (state.phase.outcome->won) return state.phase.outcome->score;
  const int early = state.phase.ended_early ? 1 : 0;
  const int missing = state.config.num_colours - count_complete_colour_clusters(state);
  return -static_cast<double>(early + missing + count_wrong_hints(state));
}

double shaped_step_reward(const EventList& events, double weight) {
  if (weight < 0.0) throw std::invalid_argument("shaping weight must be >= 0");
  if (weight == 0.0) return 0.0;
  return weight * count_shaping_events(events).net();
}

RewardBreakdown step_reward(const GameState& next, const EventList& events, double weight) {
  RewardBreakdown out;
  out.shaped = count_shaping_events(events);
  out.shaping_weight = weight;
  out.terminal = next.phase.terminal ? terminal_reward(next) : 0.0;
  out.total = out.terminal + shaped_step_reward(events, weight);
  return out;
}

}  // namespace yle
