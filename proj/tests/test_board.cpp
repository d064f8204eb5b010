#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <set>

#include "oracle.hpp"
#include "yle/board.hpp"
#include "yle/game.hpp"

namespace yle {
namespace {

std::set<Cell> as_set(const CellSet& cells, int g) {
  const std::vector<Cell> list = cells_of(cells, g);
  return {list.begin(), list.end()};
}

int count_edges_by_enumeration(const std::vector<Cell>& cells) {
  int edges = 0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    for (std::size_t j = i + 1; j < cells.size(); ++j) {
      edges += std::abs(cells[i].row - cells[j].row) +
                   std::abs(cells[i].col - cells[j].col) == 1;
    }
  }
  return edges;
}

TEST_CASE("initial 3x3 block has the grid-graph adjacency") {
  const GameConfig config = GameConfig::make(Variant::k3x3, 2);
  const GameState state = new_game(config, 11);
  const std::vector<Cell> cells = oracle::card_cells(state);
  // Side-adjacent pairs in a 3x3 block, counted by enumeration.
  REQUIRE(count_edges_by_enumeration(cells) == 12);
  int edges = 0;
  for (int i = 0; i < 9; ++i) edges += std::popcount(state.board.adjacency[i]);
  CHECK(edges / 2 == 12);
  for (int i = 0; i < 9; ++i) {
    CHECK((state.board.adjacency[i] >> i & 1U) == 0);
    for (int j = 0; j < 9; ++j) {
      CHECK(((state.board.adjacency[i] >> j) & 1U) == ((state.board.adjacency[j] >> i) & 1U));
    }
  }
}

TEST_CASE("middle card of a row of three has no legal target") {
  const std::vector<Cell> cells = {{4, 3}, {4, 4}, {4, 5}};
  const std::vector<std::uint8_t> colours = {0, 1, 2};
  const BoardState board = BoardState::from_layout(9, cells, colours);
  CHECK(legal_move_targets_fast(board, 1).none());
  CHECK(reference::legal_move_targets_reachability(board, 1).none());
  // End cards can swing around.
  CHECK(legal_move_targets_fast(board, 0).any());
}

TEST_CASE("domino: targets are the other card's free side cells") {
  const std::vector<Cell> cells = {{4, 4}, {4, 5}};
  const std::vector<std::uint8_t> colours = {0, 0};
  const BoardState board = BoardState::from_layout(9, cells, colours);
  const std::set<Cell> expected = {{3, 5}, {5, 5}, {4, 6}};
  CHECK(as_set(legal_move_targets_fast(board, 0), 9) == expected);
  CHECK(as_set(reference::legal_move_targets_reachability(board, 0), 9) == expected);
}

TEST_CASE("domino against the border keeps targets in bounds") {
  const std::vector<Cell> cells = {{0, 1}, {0, 0}};
  const std::vector<std::uint8_t> colours = {0, 0};
  const BoardState board = BoardState::from_layout(9, cells, colours);
  const std::set<Cell> expected = {{1, 0}};
  CHECK(as_set(legal_move_targets_fast(board, 0), 9) == expected);
}

TEST_CASE("corner card of the start block matches the flood-fill oracle") {
  const GameConfig config = GameConfig::make(Variant::k3x3, 2);
  const GameState state = new_game(config, 5);
  const int corner = 0;  // (3, 3)
  REQUIRE(state.board.positions[corner] == Cell{3, 3});
  const std::set<Cell> expected = oracle::legal_targets(state, corner);
  CHECK(as_set(legal_move_targets_fast(state.board, corner), 9) == expected);
  CHECK(as_set(reference::legal_move_targets_reachability(state.board, corner), 9) ==
        expected);
  // Frozen from the oracle: the ring cells that still touch the other eight
  // cards.
  CHECK(expected.size() == 10);
}

TEST_CASE("fast targets, reachability matrix, and flood fill agree on random boards") {
  Rng rng(2024);
  for (Variant variant : {Variant::k3x3, Variant::k4x4}) {
    const GameConfig config = GameConfig::make(variant, 2);
    for (int trial = 0; trial < 60; ++trial) {
      const GameState state = oracle::random_connected_board(config, rng);
      for (int card = 0; card < config.num_cards; ++card) {
        const std::set<Cell> expected = oracle::legal_targets(state, card);
        REQUIRE(as_set(legal_move_targets_fast(state.board, card), config.grid_side) ==
                expected);
        if (trial % 10 == 0) {
          REQUIRE(as_set(reference::legal_move_targets_reachability(state.board, card),
                         config.grid_side) == expected);
        }
      }
    }
  }
}

TEST_CASE("move_card keeps adjacency equal to a rebuild from positions") {
  Rng rng(7);
  const GameConfig config = GameConfig::make(Variant::k4x4, 3);
  for (int trial = 0; trial < 50; ++trial) {
    GameState state = oracle::random_connected_board(config, rng);
    for (int moves = 0; moves < 10; ++moves) {
      const int card = static_cast<int>(uniform_below(rng, config.num_cards));
      const std::vector<Cell> targets =
          cells_of(legal_move_targets_fast(state.board, card), config.grid_side);
      if (targets.empty()) continue;
      state.board.move_card(card, targets[uniform_below(rng, targets.size())]);
      BoardState rebuilt = state.board;
      rebuilt.rebuild_derived();
      REQUIRE(rebuilt == state.board);
      REQUIRE(is_connected(state.board.adjacency, state.board.all_cards()));
    }
  }
}

TEST_CASE("reachability matrix on small graphs") {
  using reference::reachability_all_positive;
  CHECK(reachability_all_positive({}));
  CHECK(reachability_all_positive({{0}}));
  CHECK(reachability_all_positive({{0, 1, 0}, {1, 0, 1}, {0, 1, 0}}));
  CHECK_FALSE(reachability_all_positive({{0, 1, 0}, {1, 0, 0}, {0, 0, 0}}));
  // A path of four needs the full power (I + A)^3.
  CHECK(reachability_all_positive(
      {{0, 1, 0, 0}, {1, 0, 1, 0}, {0, 1, 0, 1}, {0, 0, 1, 0}}));
}

TEST_CASE("layout errors") {
  const std::vector<Cell> overlap = {{1, 1}, {1, 1}};
  const std::vector<std::uint8_t> colours = {0, 1};
  CHECK_THROWS_AS(BoardState::from_layout(9, overlap, colours), std::invalid_argument);
  const std::vector<Cell> outside = {{9, 0}, {1, 1}};
  CHECK_THROWS_AS(BoardState::from_layout(9, outside, colours), std::invalid_argument);
}

}  // namespace
}  // namespace yle
