#pragma once

#include <array>
#include <bit>
#include <bitset>
#include <cstdint>
#include <span>
#include <vector>

#include "yle/config.hpp"

namespace yle {

// One bit per card index.
using CardMask = std::uint32_t;
// One bit per colour index.
using ColourMask = std::uint8_t;
// One bit per grid cell, indexed row * grid_side + col.
using CellSet = std::bitset<kMaxGridCells>;

struct Cell {
  int row = 0;
  int col = 0;
  auto operator<=>(const Cell&) const = default;
};

inline constexpr int kNoCard = -1;

template <typename Fn>
inline void for_each_bit(CardMask mask, Fn&& fn) {
  while (mask != 0) {
    fn(std::countr_zero(mask));
    mask &= mask - 1;
  }
}

// Ground-truth card layout. Adjacency is stored as one bitmask row per card;
// bit j of adjacency[i] is set iff cards i and j share a side.
struct BoardState {
  int grid_side = 9;
  int num_cards = 9;
  std::array<Cell, kMaxCards> positions{};
  std::array<std::uint8_t, kMaxCards> colours{};
  std::array<CardMask, kMaxCards> adjacency{};
  CardMask locked = 0;
  std::array<std::int8_t, kMaxGridCells> occupancy{};

  // Places `num_cards` cards at the given cells and rebuilds derived fields.
  static BoardState from_layout(int grid_side, std::span<const Cell> cells,
                                std::span<const std::uint8_t> colours);

  bool in_bounds(Cell cell) const {
    return cell.row >= 0 && cell.col >= 0 && cell.row < grid_side &&
           cell.col < grid_side;
  }
  int cell_index(Cell cell) const { return cell.row * grid_side + cell.col; }
  Cell cell_at(int index) const { return {index / grid_side, index % grid_side}; }
  int card_at(Cell cell) const {
    return in_bounds(cell) ? occupancy[cell_index(cell)] : kNoCard;
  }

  CardMask all_cards() const { return (CardMask{1} << num_cards) - 1; }
  CardMask cards_of_colour(int colour) const;
  bool is_locked(int card) const { return (locked >> card) & 1U; }

  // Moves `card` to `to`, replacing row and column `card` of the adjacency.
  // No legality checks.
  void move_card(int card, Cell to);

  // Recomputes occupancy and adjacency from positions.
  void rebuild_derived();

  // Adjacency row recomputed from positions alone.
  CardMask neighbours_from_positions(int card) const;

  bool operator==(const BoardState&) const = default;
};

// Cards reachable from `start` while staying inside `subset`.
CardMask component_of(std::span<const CardMask> adjacency, CardMask subset,
                      int start);

// True iff `subset` forms one component (empty and singleton sets count).
bool is_connected(std::span<const CardMask> adjacency, CardMask subset);

// Number of connected components of `subset`.
int count_components(std::span<const CardMask> adjacency, CardMask subset);

// Cells `card` may move to: empty after lifting the card, different from its
// current cell, and leaving all cards one side-connected component.
//
// Lifts the card, labels the remaining components once, and accepts an empty
// cell iff its side-neighbours touch every component.
CellSet legal_move_targets_fast(const BoardState& board, int card);

namespace reference {

// Literal reachability test: for every cell, build A' = move(A, card, cell)
// and require (I + A')^(n-1) to be strictly positive. Kept serial and
// unoptimized as a cross-check for legal_move_targets_fast.
CellSet legal_move_targets_reachability(const BoardState& board, int card);

// (I + A)^(n-1) > 0 elementwise for a dense 0/1 adjacency matrix.
bool reachability_all_positive(const std::vector<std::vector<int>>& adjacency);

}  // namespace reference

std::vector<Cell> cells_of(const CellSet& set, int grid_side);

}  // namespace yle
