#pragma once

#include "yle/game.hpp"

namespace yle {

struct ShapedCounts {
  int new_card_peek = 0;
  int cluster_max_increase = 0;
  int hint_correct = 0;
  int hint_wrong = 0;

  int net() const { return new_card_peek + cluster_max_increase + hint_correct - hint_wrong; }
  ShapedCounts& operator+=(const ShapedCounts& other);
  bool operator==(const ShapedCounts&) const = default;
};

struct RewardBreakdown {
  double terminal = 0.0;
  ShapedCounts shaped;
  double shaping_weight = 0.0;
  double total = 0.0;
};

ShapedCounts count_shaping_events(const EventList& events);

// Won: the game score. Lost: -ended_early - (|C| - complete clusters) -
// wrong hints. Throws ContractError on a non-terminal state.
double terminal_reward(const GameState& state);

// weight * (new peeks + cluster maxima + correct hints - wrong hints).
double shaped_step_reward(const EventList& events, double weight);

// Reward for the transition into `next` that produced `events`. The terminal
// term is added only when `next` is terminal.
RewardBreakdown step_reward(const GameState& next, const EventList& events, double weight);

}  // namespace yle
