#include "yle/action_mask.hpp"

#include <algorithm>
#include <cstring>
#include <stdexcept>

namespace yle {

int ActionMask::count() const {
  return static_cast<int>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
}

std::vector<int> ActionMask::indices() const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (test(i)) out.push_back(i);
  }
  return out;
}

int ActionMask::nth_set(int k) const {
  for (int i = 0; i < size(); ++i) {
    if (test(i) && k-- == 0) return i;
  }
  throw std::out_of_range("mask has fewer set bits than requested");
}

std::vector<std::uint8_t> ActionMask::pack() const {
  std::vector<std::uint8_t> packed((bits_.size() + 7) / 8, 0);
  for (std::size_t i = 0; i < bits_.size(); ++i) {
    if (bits_[i] != 0) packed[i / 8] |= static_cast<std::uint8_t>(1U << (i % 8));
  }
  return packed;
}

ActionMask ActionMask::unpack(const std::vector<std::uint8_t>& packed, int size) {
  if (packed.size() * 8 < static_cast<std::size_t>(size)) {
    throw std::invalid_argument("packed mask too short");
  }
  ActionMask mask(size);
  for (int i = 0; i < size; ++i) mask.set(i, (packed[i / 8] >> (i % 8)) & 1U);
  return mask;
}

void fill_legal_mask(const GameState& state, int agent, const ActionLayout& layout,
                     std::uint8_t* out) {
  std::memset(out, 0, static_cast<std::size_t>(layout.size));
  const TurnPhase& phase = state.phase;
  if (phase.terminal || agent != phase.current_player) {
    out[layout.no_op] = 1;
    return;
  }
  const BoardState& board = state.board;
  const int num_cards = state.config.num_cards;
  switch (phase.substep) {
    case Substep::kPeek1:
    case Substep::kPeek2:
      if (phase.substep == Substep::kPeek1) out[layout.end_game] = 1;
      for (int card = 0; card < num_cards; ++card) {
        if (board.is_locked(card)) continue;
        if (phase.num_peeked > 0 && card == phase.peeked[0]) continue;
        out[layout.observe_begin + card] = 1;
      }
      return;
    case Substep::kMove: {
      const int cells = board.grid_side * board.grid_side;
      bool any = false;
      for (int card = 0; card < num_cards; ++card) {
        if (board.is_locked(card)) continue;
        const CellSet targets = legal_move_targets_fast(board, card);
        if (targets.none()) continue;
        any = true;
        std::uint8_t* row = out + layout.move_begin + card * cells;
        for (int index = 0; index < cells; ++index) row[index] = targets.test(index);
      }
      if (!any) out[layout.no_op] = 1;
      return;
    }
    case Substep::kHint:
      for (const HintCard& hint : state.hints) {
        if (hint.status == HintStatus::kFaceDown) {
          out[layout.reveal_begin + hint.id] = 1;
        } else if (hint.status == HintStatus::kRevealed) {
          const int base = layout.place_begin + hint.id * layout.targets_per_hint;
          for (int card = 0; card < num_cards; ++card) {
            if (board.is_locked(card)) continue;
            const int target = layout.indexing == HintTargetIndexing::kCell
                                   ? board.cell_index(board.positions[card])
                                   : card;
            out[base + target] = 1;
          }
        }
      }
      return;
  }
}

ActionMask legal_mask(const GameState& state, int agent) {
  const ActionLayout layout = ActionLayout::of(state.config);
  ActionMask mask(layout.size);
  std::vector<std::uint8_t> buffer(static_cast<std::size_t>(layout.size));
  fill_legal_mask(state, agent, layout, buffer.data());
  for (int i = 0; i < layout.size; ++i) mask.set(i, buffer[i] != 0);
  return mask;
}

}  // namespace yle
