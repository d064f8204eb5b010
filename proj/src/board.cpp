#include "yle/board.hpp"

#include <cstdlib>
#include <stdexcept>

namespace yle {

namespace {

constexpr std::array<Cell, 4> kSideOffsets = {
    Cell{-1, 0}, Cell{1, 0}, Cell{0, -1}, Cell{0, 1}};

}  // namespace

BoardState BoardState::from_layout(int grid_side, std::span<const Cell> cells,
                                   std::span<const std::uint8_t> colours) {
  if (cells.size() != colours.size() || cells.size() > kMaxCards) {
    throw std::invalid_argument("layout needs one colour per card");
  }
  BoardState board;
  board.grid_side = grid_side;
  board.num_cards = static_cast<int>(cells.size());
  for (int i = 0; i < board.num_cards; ++i) {
    if (!board.in_bounds(cells[i])) {
      throw std::invalid_argument("card placed outside the grid");
    }
    board.positions[i] = cells[i];
    board.colours[i] = colours[i];
  }
  board.rebuild_derived();
  for (int i = 0; i < board.num_cards; ++i) {
    if (board.occupancy[board.cell_index(cells[i])] != i) {
      throw std::invalid_argument("two cards share a cell");
    }
  }
  return board;
}

CardMask BoardState::cards_of_colour(int colour) const {
  CardMask mask = 0;
  for (int i = 0; i < num_cards; ++i) {
    if (colours[i] == colour) mask |= CardMask{1} << i;
  }
  return mask;
}

CardMask BoardState::neighbours_from_positions(int card) const {
  CardMask row = 0;
  for (const Cell& offset : kSideOffsets) {
    const int other =
        card_at({positions[card].row + offset.row, positions[card].col + offset.col});
    if (other != kNoCard && other != card) row |= CardMask{1} << other;
  }
  return row;
}

void BoardState::move_card(int card, Cell to) {
  occupancy[cell_index(positions[card])] = kNoCard;
  positions[card] = to;
  occupancy[cell_index(to)] = static_cast<std::int8_t>(card);

  const CardMask bit = CardMask{1} << card;
  for (int j = 0; j < num_cards; ++j) adjacency[j] &= ~bit;
  const CardMask row = neighbours_from_positions(card);
  adjacency[card] = row;
  for_each_bit(row, [&](int j) { adjacency[j] |= bit; });
}

void BoardState::rebuild_derived() {
  occupancy.fill(kNoCard);
  for (int i = 0; i < num_cards; ++i) {
    occupancy[cell_index(positions[i])] = static_cast<std::int8_t>(i);
  }
  for (int i = 0; i < num_cards; ++i) adjacency[i] = neighbours_from_positions(i);
  for (int i = num_cards; i < kMaxCards; ++i) adjacency[i] = 0;
}

CardMask component_of(std::span<const CardMask> adjacency, CardMask subset,
                      int start) {
  CardMask reached = CardMask{1} << start;
  CardMask frontier = reached;
  while (frontier != 0) {
    CardMask next = 0;
    for_each_bit(frontier, [&](int j) { next |= adjacency[j]; });
    next &= subset & ~reached;
    reached |= next;
    frontier = next;
  }
  return reached;
}

bool is_connected(std::span<const CardMask> adjacency, CardMask subset) {
  if (subset == 0) return true;
  return component_of(adjacency, subset, std::countr_zero(subset)) == subset;
}

int count_components(std::span<const CardMask> adjacency, CardMask subset) {
  int count = 0;
  while (subset != 0) {
    subset &= ~component_of(adjacency, subset, std::countr_zero(subset));
    ++count;
  }
  return count;
}

CellSet legal_move_targets_fast(const BoardState& board, int card) {
  CellSet targets;
  const CardMask bit = CardMask{1} << card;
  const CardMask rest = board.all_cards() & ~bit;
  if (rest == 0) return targets;

  // Adjacency with `card` lifted off the board.
  std::array<CardMask, kMaxCards> lifted{};
  for (int j = 0; j < board.num_cards; ++j) lifted[j] = board.adjacency[j] & ~bit;

  std::array<std::uint8_t, kMaxCards> label{};
  int num_labels = 0;
  for (CardMask todo = rest; todo != 0;) {
    const CardMask comp = component_of(lifted, rest, std::countr_zero(todo));
    for_each_bit(comp, [&](int j) { label[j] = static_cast<std::uint8_t>(num_labels); });
    todo &= ~comp;
    ++num_labels;
  }
  // A single empty cell touches at most four cards.
  if (num_labels > 4) return targets;

  const std::uint8_t all_labels = static_cast<std::uint8_t>((1U << num_labels) - 1);
  std::array<std::uint8_t, kMaxGridCells> touched{};
  const int own_index = board.cell_index(board.positions[card]);
  for_each_bit(rest, [&](int j) {
    const Cell at = board.positions[j];
    for (const Cell& offset : kSideOffsets) {
      const Cell n{at.row + offset.row, at.col + offset.col};
      if (!board.in_bounds(n)) continue;
      const int index = board.cell_index(n);
      if (index == own_index || board.occupancy[index] != kNoCard) continue;
      touched[index] |= static_cast<std::uint8_t>(1U << label[j]);
    }
  });
  const int cells = board.grid_side * board.grid_side;
  for (int index = 0; index < cells; ++index) {
    if (touched[index] == all_labels) targets.set(index);
  }
  return targets;
}

namespace reference {

bool reachability_all_positive(const std::vector<std::vector<int>>& adjacency) {
  const std::size_t n = adjacency.size();
  if (n <= 1) return true;
  std::vector<std::vector<int>> step(n, std::vector<int>(n, 0));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) step[i][j] = (i == j) || adjacency[i][j] ? 1 : 0;
  }
  // Entries are clamped to {0, 1}; only positivity matters.
  std::vector<std::vector<int>> power = step;
  for (std::size_t p = 1; p + 1 < n; ++p) {
    std::vector<std::vector<int>> next(n, std::vector<int>(n, 0));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        if (power[i][k] == 0) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (step[k][j] != 0) next[i][j] = 1;
        }
      }
    }
    power = std::move(next);
  }
  for (const auto& row : power) {
    for (int value : row) {
      if (value <= 0) return false;
    }
  }
  return true;
}

CellSet legal_move_targets_reachability(const BoardState& board, int card) {
  CellSet targets;
  const int n = board.num_cards;
  for (int row = 0; row < board.grid_side; ++row) {
    for (int col = 0; col < board.grid_side; ++col) {
      const Cell cell{row, col};
      if (cell == board.positions[card]) continue;
      const int occupant = board.card_at(cell);
      if (occupant != kNoCard) continue;
      // A' = move(A, card, cell): replace row/column `card` with the new
      // neighbour vector.
      std::vector<std::vector<int>> moved(n, std::vector<int>(n, 0));
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
          if (i != card && j != card) moved[i][j] = (board.adjacency[i] >> j) & 1U;
        }
      }
      for (int j = 0; j < n; ++j) {
        if (j == card) continue;
        const Cell other = board.positions[j];
        const int distance =
            std::abs(other.row - cell.row) + std::abs(other.col - cell.col);
        if (distance == 1) moved[card][j] = moved[j][card] = 1;
      }
      if (reachability_all_positive(moved)) targets.set(board.cell_index(cell));
    }
  }
  return targets;
}

}  // namespace reference

std::vector<Cell> cells_of(const CellSet& set, int grid_side) {
  std::vector<Cell> cells;
  for (int index = 0; index < grid_side * grid_side; ++index) {
    if (set.test(index)) cells.push_back({index / grid_side, index % grid_side});
  }
  return cells;
}

}  // namespace yle
