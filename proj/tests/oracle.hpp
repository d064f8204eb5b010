#pragma once

// Test-only oracles. These recompute rules facts from card positions and
// colours with plain grid flood fills, sharing no code with the engine's
// bitmask adjacency.

#include <cstdint>
#include <queue>
#include <set>
#include <vector>

#include "yle/action_mask.hpp"
#include "yle/game.hpp"
#include "yle/rng.hpp"

namespace yle::oracle {

// True iff the cells in `cells` form one side-connected group.
inline bool cells_connected(const std::vector<Cell>& cells) {
  if (cells.size() <= 1) return true;
  std::set<Cell> remaining(cells.begin(), cells.end());
  std::queue<Cell> frontier;
  frontier.push(cells.front());
  remaining.erase(cells.front());
  while (!frontier.empty()) {
    const Cell at = frontier.front();
    frontier.pop();
    const Cell around[4] = {{at.row - 1, at.col}, {at.row + 1, at.col},
                            {at.row, at.col - 1}, {at.row, at.col + 1}};
    for (const Cell& n : around) {
      auto it = remaining.find(n);
      if (it == remaining.end()) continue;
      remaining.erase(it);
      frontier.push(n);
    }
  }
  return remaining.empty();
}

inline std::vector<Cell> card_cells(const GameState& state) {
  return {state.board.positions.begin(),
          state.board.positions.begin() + state.config.num_cards};
}

// Lift `card`, try every cell of the grid, flood fill.
inline std::set<Cell> legal_targets(const GameState& state, int card) {
  std::set<Cell> out;
  const std::vector<Cell> cells = card_cells(state);
  const int g = state.config.grid_side;
  for (int row = 0; row < g; ++row) {
    for (int col = 0; col < g; ++col) {
      const Cell target{row, col};
      if (target == cells[card]) continue;
      bool occupied = false;
      for (std::size_t j = 0; j < cells.size(); ++j) {
        if (static_cast<int>(j) != card && cells[j] == target) occupied = true;
      }
      if (occupied) continue;
      std::vector<Cell> moved = cells;
      moved[card] = target;
      if (cells_connected(moved)) out.insert(target);
    }
  }
  return out;
}

inline bool colour_connected(const GameState& state, int colour) {
  std::vector<Cell> cells;
  for (int i = 0; i < state.config.num_cards; ++i) {
    if (state.board.colours[i] == colour) cells.push_back(state.board.positions[i]);
  }
  return cells_connected(cells);
}

inline bool win(const GameState& state) {
  for (int c = 0; c < state.config.num_colours; ++c) {
    if (!colour_connected(state, c)) return false;
  }
  return true;
}

inline int complete_colours(const GameState& state) {
  int n = 0;
  for (int c = 0; c < state.config.num_colours; ++c) n += colour_connected(state, c);
  return n;
}

// Uniformly random legal action for the current player.
inline Action random_legal_action(const GameState& state, Rng& rng) {
  const ActionMask mask = legal_mask(state, state.phase.current_player);
  const std::vector<int> legal = mask.indices();
  const int pick = legal[uniform_below(rng, legal.size())];
  return decode(pick, state.config);
}

// Plays `steps` random legal steps (fewer if the game ends).
inline GameState random_playout(GameState state, int steps, Rng& rng) {
  for (int s = 0; s < steps && !state.phase.terminal; ++s) {
    const Action a = random_legal_action(state, rng);
    step(state, joint_action_for(state, state.phase.current_player, a));
  }
  return state;
}

// Random reachable non-terminal state, avoiding EndGame so that games reach
// late-game layouts.
inline GameState random_reachable_state(const GameConfig& config, Rng& rng) {
  GameState state = new_game(config, rng());
  const int target_steps = static_cast<int>(uniform_below(rng, config.max_episode_length()));
  for (int s = 0; s < target_steps; ++s) {
    const ActionMask mask = legal_mask(state, state.phase.current_player);
    std::vector<int> legal = mask.indices();
    if (legal.size() > 1 && legal.front() == 0) legal.erase(legal.begin());
    GameState next = state;
    const Action a = decode(legal[uniform_below(rng, legal.size())], config);
    step(next, joint_action_for(next, next.phase.current_player, a));
    if (next.phase.terminal) break;
    state = std::move(next);
  }
  return state;
}

// Random board of arbitrary connected shape: grow a polyomino from the
// centre, then assign a shuffled colour multiset.
inline GameState random_connected_board(const GameConfig& config, Rng& rng) {
  const int g = config.grid_side;
  std::vector<Cell> cells = {{g / 2, g / 2}};
  std::set<Cell> used(cells.begin(), cells.end());
  while (static_cast<int>(cells.size()) < config.num_cards) {
    const Cell from = cells[uniform_below(rng, cells.size())];
    const Cell around[4] = {{from.row - 1, from.col}, {from.row + 1, from.col},
                            {from.row, from.col - 1}, {from.row, from.col + 1}};
    const Cell n = around[uniform_below(rng, 4)];
    if (n.row < 0 || n.col < 0 || n.row >= g || n.col >= g || used.count(n)) continue;
    used.insert(n);
    cells.push_back(n);
  }
  std::vector<std::uint8_t> colours(config.num_cards);
  for (int i = 0; i < config.num_cards; ++i) {
    colours[i] = static_cast<std::uint8_t>(i / config.block_side());
  }
  shuffle_in_place(std::span<std::uint8_t>(colours), rng);
  std::vector<HintCard> hints = draw_hint_deck(config, rng());
  return state_from_layout(config, cells, colours, hints, TurnPhase{});
}

// Random legal action for the current player, EndGame only when nothing else
// is legal.
inline Action random_action_no_end(const GameState& state, Rng& rng) {
  std::vector<int> legal = legal_mask(state, state.phase.current_player).indices();
  if (legal.size() > 1 && legal.front() == 0) legal.erase(legal.begin());
  return decode(legal[uniform_below(rng, legal.size())], state.config);
}

}  // namespace yle::oracle
