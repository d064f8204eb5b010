#include "yle/action.hpp"

#include <sstream>

namespace yle {

ActionLayout ActionLayout::of(const GameConfig& config) {
  ActionLayout layout;
  layout.num_cards = config.num_cards;
  layout.grid_side = config.grid_side;
  layout.num_hints = config.num_hints();
  layout.indexing = config.hint_target_indexing;
  const int cells = config.grid_side * config.grid_side;
  layout.targets_per_hint =
      config.hint_target_indexing == HintTargetIndexing::kCell ? cells
                                                               : config.num_cards;
  layout.end_game = 0;
  layout.observe_begin = 1;
  layout.move_begin = layout.observe_begin + layout.num_cards;
  layout.reveal_begin = layout.move_begin + layout.num_cards * cells;
  layout.place_begin = layout.reveal_begin + layout.num_hints;
  layout.no_op = layout.place_begin + layout.num_hints * layout.targets_per_hint;
  layout.size = layout.no_op + 1;
  return layout;
}

int ActionLayout::encode(const Action& action) const {
  const int cells = grid_side * grid_side;
  auto check = [](bool ok, const char* what) {
    if (!ok) throw ActionIndexError(std::string("malformed action: ") + what);
  };
  auto cell_index = [&](Cell cell) {
    check(cell.row >= 0 && cell.col >= 0 && cell.row < grid_side && cell.col < grid_side,
          "cell outside the grid");
    return cell.row * grid_side + cell.col;
  };
  switch (action.kind) {
    case ActionKind::kNoOp:
      return no_op;
    case ActionKind::kEndGame:
      return end_game;
    case ActionKind::kObserveCard:
      check(action.card >= 0 && action.card < num_cards, "card out of range");
      return observe_begin + action.card;
    case ActionKind::kMoveCard:
      check(action.card >= 0 && action.card < num_cards, "card out of range");
      return move_begin + action.card * cells + cell_index(action.cell);
    case ActionKind::kRevealHint:
      check(action.hint >= 0 && action.hint < num_hints, "hint out of range");
      return reveal_begin + action.hint;
    case ActionKind::kPlaceHint: {
      check(action.hint >= 0 && action.hint < num_hints, "hint out of range");
      int target = 0;
      if (indexing == HintTargetIndexing::kCell) {
        target = cell_index(action.cell);
      } else {
        check(action.card >= 0 && action.card < num_cards, "card out of range");
        target = action.card;
      }
      return place_begin + action.hint * targets_per_hint + target;
    }
  }
  throw ActionIndexError("unknown action kind");
}

Action ActionLayout::decode(int index) const {
  if (index < 0 || index >= size) {
    throw ActionIndexError("action index " + std::to_string(index) +
                           " outside [0, " + std::to_string(size) + ")");
  }
  const int cells = grid_side * grid_side;
  if (index == end_game) return Action::end_game();
  if (index == no_op) return Action::no_op();
  if (index < move_begin) return Action::observe(index - observe_begin);
  if (index < reveal_begin) {
    const int offset = index - move_begin;
    const int cell = offset % cells;
    return Action::move(offset / cells, {cell / grid_side, cell % grid_side});
  }
  if (index < place_begin) return Action::reveal(index - reveal_begin);
  const int offset = index - place_begin;
  const int hint = offset / targets_per_hint;
  const int target = offset % targets_per_hint;
  if (indexing == HintTargetIndexing::kCell) {
    return Action::place_on_cell(hint, {target / grid_side, target % grid_side});
  }
  return Action::place_on_card(hint, target);
}

int action_count(const GameConfig& config) { return ActionLayout::of(config).size; }

int encode(const Action& action, const GameConfig& config) {
  return ActionLayout::of(config).encode(action);
}

Action decode(int index, const GameConfig& config) {
  return ActionLayout::of(config).decode(index);
}

std::string_view to_string(ActionKind kind) {
  switch (kind) {
    case ActionKind::kNoOp:
      return "NoOp";
    case ActionKind::kEndGame:
      return "EndGame";
    case ActionKind::kObserveCard:
      return "ObserveCard";
    case ActionKind::kMoveCard:
      return "MoveCard";
    case ActionKind::kRevealHint:
      return "RevealHint";
    case ActionKind::kPlaceHint:
      return "PlaceHint";
  }
  return "?";
}

std::string to_string(const Action& action) {
  std::ostringstream out;
  out << to_string(action.kind);
  switch (action.kind) {
    case ActionKind::kObserveCard:
      out << "(" << action.card << ")";
      break;
    case ActionKind::kMoveCard:
      out << "(" << action.card << ", (" << action.cell.row << "," << action.cell.col
          << "))";
      break;
    case ActionKind::kRevealHint:
      out << "(" << action.hint << ")";
      break;
    case ActionKind::kPlaceHint:
      if (action.card >= 0) {
        out << "(" << action.hint << ", card " << action.card << ")";
      } else {
        out << "(" << action.hint << ", (" << action.cell.row << "," << action.cell.col
            << "))";
      }
      break;
    default:
      break;
  }
  return out.str();
}

}  // namespace yle
