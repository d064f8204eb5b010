#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "yle/board.hpp"
#include "yle/config.hpp"

namespace yle {

enum class ActionKind : std::uint8_t {
  kNoOp,
  kEndGame,
  kObserveCard,
  kMoveCard,
  kRevealHint,
  kPlaceHint,
};

// Decoded action. Fields not used by `kind` stay at their defaults:
//   ObserveCard(card)        card
//   MoveCard(card, cell)     card, cell
//   RevealHint(hint)         hint
//   PlaceHint(hint, target)  hint, and cell (Cell indexing) or card (Card
//                            indexing)
struct Action {
  ActionKind kind = ActionKind::kNoOp;
  int card = -1;
  Cell cell{-1, -1};
  int hint = -1;

  static Action no_op() { return {}; }
  static Action end_game() { return {ActionKind::kEndGame}; }
  static Action observe(int card) { return {ActionKind::kObserveCard, card}; }
  static Action move(int card, Cell to) { return {ActionKind::kMoveCard, card, to}; }
  static Action reveal(int hint) { return {ActionKind::kRevealHint, -1, {-1, -1}, hint}; }
  static Action place_on_cell(int hint, Cell cell) {
    return {ActionKind::kPlaceHint, -1, cell, hint};
  }
  static Action place_on_card(int hint, int card) {
    return {ActionKind::kPlaceHint, card, {-1, -1}, hint};
  }

  bool operator==(const Action&) const = default;
};

std::string to_string(const Action& action);
std::string_view to_string(ActionKind kind);

class ActionIndexError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

// Block offsets of the canonical categorical layout:
//   [EndGame][ObserveCard x |Y|][MoveCard x |Y| g^2][RevealHint x |H|]
//   [PlaceHint x |H| T][NoOp]
// with T = g^2 (Cell indexing) or |Y| (Card indexing). MoveCard is card-major
// then row-major cell; PlaceHint is hint-major then target.
struct ActionLayout {
  int num_cards = 0;
  int grid_side = 0;
  int num_hints = 0;
  int targets_per_hint = 0;
  HintTargetIndexing indexing = HintTargetIndexing::kCell;

  int end_game = 0;
  int observe_begin = 0;
  int move_begin = 0;
  int reveal_begin = 0;
  int place_begin = 0;
  int no_op = 0;
  int size = 0;

  static ActionLayout of(const GameConfig& config);

  int encode(const Action& action) const;
  Action decode(int index) const;
};

int action_count(const GameConfig& config);
int encode(const Action& action, const GameConfig& config);
Action decode(int index, const GameConfig& config);

}  // namespace yle
