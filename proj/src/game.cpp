#include "yle/game.hpp"

#include <algorithm>
#include <bit>

#include "yle/rng.hpp"

namespace yle {

std::string_view to_string(Substep substep) {
  switch (substep) {
    case Substep::kPeek1:
      return "Peek1";
    case Substep::kPeek2:
      return "Peek2";
    case Substep::kMove:
      return "Move";
    case Substep::kHint:
      return "Hint";
  }
  return "?";
}

std::string_view to_string(EventKind kind) {
  switch (kind) {
    case EventKind::kPeekedNewTeamCard:
      return "PeekedNewTeamCard";
    case EventKind::kClusterCountIncreasedBeyondMax:
      return "ClusterCountIncreasedBeyondMax";
    case EventKind::kHintPlacedCorrect:
      return "HintPlacedCorrect";
    case EventKind::kHintPlacedWrong:
      return "HintPlacedWrong";
    case EventKind::kGameEnded:
      return "GameEnded";
  }
  return "?";
}

std::string_view reason_code(RejectReason reason) {
  switch (reason) {
    case RejectReason::kGameOver:
      return "GAME_OVER";
    case RejectReason::kWrongJointSize:
      return "WRONG_JOINT_SIZE";
    case RejectReason::kInactiveAgentActed:
      return "OUT_OF_TURN";
    case RejectReason::kCurrentPlayerNoOp:
      return "NOOP_NOT_ALLOWED";
    case RejectReason::kWrongPhase:
      return "WRONG_PHASE";
    case RejectReason::kCardOutOfRange:
      return "CARD_OUT_OF_RANGE";
    case RejectReason::kCardLocked:
      return "CARD_LOCKED";
    case RejectReason::kRepeatedPeek:
      return "REPEATED_PEEK";
    case RejectReason::kIllegalTarget:
      return "ILLEGAL_TARGET";
    case RejectReason::kHintOutOfRange:
      return "HINT_OUT_OF_RANGE";
    case RejectReason::kHintNotFaceDown:
      return "HINT_NOT_FACE_DOWN";
    case RejectReason::kHintNotRevealed:
      return "HINT_NOT_REVEALED";
    case RejectReason::kMalformedAction:
      return "MALFORMED_ACTION";
  }
  return "UNKNOWN";
}

IllegalAction::IllegalAction(RejectReason reason, const std::string& detail)
    : std::runtime_error(std::string(reason_code(reason)) + ": " + detail),
      reason_(reason) {}

Cell start_cell(const GameConfig& config, int index) {
  const int k = config.block_side();
  const int offset = (config.grid_side - k) / 2;
  return {offset + index / k, offset + index % k};
}

namespace {

std::vector<HintCard> draw_hints(const GameConfig& config, Rng& rng) {
  std::vector<HintCard> deck;
  for (int size = 1; size <= 3; ++size) {
    const int wanted = config.hint_deck.count_of_size(size);
    if (wanted == 0) continue;
    std::vector<ColourMask> candidates;
    for (unsigned mask = 1; mask < (1U << config.num_colours); ++mask) {
      if (std::popcount(mask) == size) candidates.push_back(static_cast<ColourMask>(mask));
    }
    shuffle_in_place(std::span<ColourMask>(candidates), rng);
    for (int i = 0; i < wanted; ++i) {
      HintCard hint;
      hint.id = static_cast<int>(deck.size());
      hint.colours = candidates[i];
      deck.push_back(hint);
    }
  }
  return deck;
}

void record_peek(GameState& state, int agent, int card, EventList& events) {
  if (state.team_peeked[card] == 0) {
    events.push_back({EventKind::kPeekedNewTeamCard, card});
  }
  state.team_peeked[card] |= static_cast<std::uint8_t>(1U << agent);
  state.peek_history[agent] |= CardMask{1} << card;
  state.phase.peeked[state.phase.num_peeked++] = card;
}

void finish(GameState& state, bool early, EventList& events) {
  state.phase.terminal = true;
  state.phase.ended_early = early;
  const bool won = check_win(state);
  state.phase.outcome = Outcome{won, won ? score_hint_pool(state) : 0};
  events.push_back({EventKind::kGameEnded, kNoCard, -1, early, won});
}

void end_turn(GameState& state) {
  state.phase.current_player = (state.phase.current_player + 1) % state.config.num_players;
  state.phase.substep = Substep::kPeek1;
  state.phase.peeked = {kNoCard, kNoCard};
  state.phase.num_peeked = 0;
}

[[noreturn]] void reject(RejectReason reason, const std::string& detail) {
  throw IllegalAction(reason, detail);
}

void check_card(const GameState& state, int card) {
  if (card < 0 || card >= state.config.num_cards) {
    reject(RejectReason::kCardOutOfRange, "card " + std::to_string(card));
  }
  if (state.board.is_locked(card)) {
    reject(RejectReason::kCardLocked, "card " + std::to_string(card) + " is locked");
  }
}

void check_hint(const GameState& state, int hint) {
  if (hint < 0 || hint >= static_cast<int>(state.hints.size())) {
    reject(RejectReason::kHintOutOfRange, "hint " + std::to_string(hint));
  }
}

// Card a PlaceHint action targets, or kNoCard if the target is empty.
int place_target_card(const GameState& state, const Action& action) {
  if (state.config.hint_target_indexing == HintTargetIndexing::kCard) {
    return action.card >= 0 && action.card < state.config.num_cards ? action.card
                                                                    : kNoCard;
  }
  return state.board.card_at(action.cell);
}

}  // namespace

std::vector<HintCard> draw_hint_deck(const GameConfig& config, std::uint64_t seed) {
  Rng rng(seed);
  return draw_hints(config, rng);
}

GameState new_game(const GameConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);

  const int k = config.block_side();
  std::vector<std::uint8_t> colours(config.num_cards);
  for (int i = 0; i < config.num_cards; ++i) colours[i] = static_cast<std::uint8_t>(i / k);
  shuffle_in_place(std::span<std::uint8_t>(colours), rng);

  std::vector<Cell> cells(config.num_cards);
  for (int i = 0; i < config.num_cards; ++i) cells[i] = start_cell(config, i);

  GameState state;
  state.config = config;
  state.config.seed = seed;
  state.seed = seed;
  state.board = BoardState::from_layout(config.grid_side, cells, colours);
  state.hints = draw_hints(config, rng);
  state.max_complete_colours_seen = count_complete_colour_clusters(state);
  return state;
}

GameState state_from_layout(const GameConfig& config, std::span<const Cell> cells,
                            std::span<const std::uint8_t> colours,
                            std::vector<HintCard> hints, const TurnPhase& phase) {
  config.validate();
  if (static_cast<int>(cells.size()) != config.num_cards) {
    throw std::invalid_argument("layout must place every card");
  }
  if (static_cast<int>(hints.size()) != config.num_hints()) {
    throw std::invalid_argument("layout must list every hint");
  }
  GameState state;
  state.config = config;
  state.seed = config.seed;
  state.board = BoardState::from_layout(config.grid_side, cells, colours);
  if (!is_connected(state.board.adjacency, state.board.all_cards())) {
    throw std::invalid_argument("layout is not side-connected");
  }
  for (int c = 0; c < config.num_colours; ++c) {
    if (std::popcount(state.board.cards_of_colour(c)) != config.block_side()) {
      throw std::invalid_argument("each colour needs exactly k cards");
    }
  }
  for (std::size_t j = 0; j < hints.size(); ++j) {
    hints[j].id = static_cast<int>(j);
    if (hints[j].status == HintStatus::kPlaced) {
      if (hints[j].placed_on < 0 || hints[j].placed_on >= config.num_cards ||
          state.board.is_locked(hints[j].placed_on)) {
        throw std::invalid_argument("placed hint needs a distinct target card");
      }
      state.board.locked |= CardMask{1} << hints[j].placed_on;
    } else {
      hints[j].placed_on = kNoCard;
    }
  }
  state.hints = std::move(hints);
  state.phase = phase;
  state.max_complete_colours_seen = count_complete_colour_clusters(state);
  return state;
}

CellSet legal_move_targets(const GameState& state, int card) {
  if (card < 0 || card >= state.config.num_cards) {
    throw ContractError("card index out of range");
  }
  if (state.phase.terminal) throw ContractError("game is over");
  if (state.board.is_locked(card)) {
    throw ContractError("card " + std::to_string(card) + " is locked");
  }
  return legal_move_targets_fast(state.board, card);
}

bool any_legal_move(const GameState& state) {
  for (int card = 0; card < state.config.num_cards; ++card) {
    if (state.board.is_locked(card)) continue;
    if (legal_move_targets_fast(state.board, card).any()) return true;
  }
  return false;
}

void validate_action(const GameState& state, int agent, const Action& action) {
  const TurnPhase& phase = state.phase;
  if (agent < 0 || agent >= state.config.num_players) {
    reject(RejectReason::kWrongJointSize, "no such agent");
  }
  if (phase.terminal || agent != phase.current_player) {
    if (action.kind == ActionKind::kNoOp) return;
    if (phase.terminal) reject(RejectReason::kGameOver, "the game has ended");
    reject(RejectReason::kInactiveAgentActed,
           "agent " + std::to_string(agent) + " is not the current player");
  }
  if (action.kind == ActionKind::kNoOp && phase.substep != Substep::kMove) {
    reject(RejectReason::kCurrentPlayerNoOp, "the current player must act");
  }

  switch (phase.substep) {
    case Substep::kPeek1:
      if (action.kind == ActionKind::kEndGame) return;
      if (action.kind != ActionKind::kObserveCard) {
        reject(RejectReason::kWrongPhase, "Peek1 accepts ObserveCard or EndGame");
      }
      check_card(state, action.card);
      return;
    case Substep::kPeek2:
      if (action.kind != ActionKind::kObserveCard) {
        reject(RejectReason::kWrongPhase, "Peek2 accepts ObserveCard only");
      }
      check_card(state, action.card);
      if (action.card == phase.peeked[0]) {
        reject(RejectReason::kRepeatedPeek, "second peek must differ from the first");
      }
      return;
    case Substep::kMove:
      if (action.kind == ActionKind::kNoOp) {
        if (any_legal_move(state)) {
          reject(RejectReason::kCurrentPlayerNoOp, "a legal move exists");
        }
        return;
      }
      if (action.kind != ActionKind::kMoveCard) {
        reject(RejectReason::kWrongPhase, "Move accepts MoveCard only");
      }
      check_card(state, action.card);
      if (!state.board.in_bounds(action.cell) ||
          !legal_move_targets_fast(state.board, action.card)
               .test(state.board.cell_index(action.cell))) {
        reject(RejectReason::kIllegalTarget, "target cell breaks the rules");
      }
      return;
    case Substep::kHint:
      if (action.kind == ActionKind::kRevealHint) {
        check_hint(state, action.hint);
        if (state.hints[action.hint].status != HintStatus::kFaceDown) {
          reject(RejectReason::kHintNotFaceDown, "hint already revealed");
        }
        return;
      }
      if (action.kind == ActionKind::kPlaceHint) {
        check_hint(state, action.hint);
        if (state.hints[action.hint].status != HintStatus::kRevealed) {
          reject(RejectReason::kHintNotRevealed, "only revealed hints can be placed");
        }
        const int target = place_target_card(state, action);
        if (target == kNoCard || state.board.is_locked(target)) {
          reject(RejectReason::kIllegalTarget, "hint target must be an unlocked card");
        }
        return;
      }
      reject(RejectReason::kWrongPhase, "Hint accepts RevealHint or PlaceHint");
  }
  reject(RejectReason::kMalformedAction, "unknown substep");
}

EventList step(GameState& state, std::span<const Action> joint_action) {
  if (static_cast<int>(joint_action.size()) != state.config.num_players) {
    reject(RejectReason::kWrongJointSize,
           "expected " + std::to_string(state.config.num_players) + " actions");
  }
  // Inactive seats first so that an out-of-turn action is reported as such
  // rather than as the current player's missing action.
  const int current = state.phase.current_player;
  for (int agent = 0; agent < state.config.num_players; ++agent) {
    if (agent != current) validate_action(state, agent, joint_action[agent]);
  }
  validate_action(state, current, joint_action[current]);
  EventList events;
  if (state.phase.terminal) return events;

  const int agent = state.phase.current_player;
  const Action& action = joint_action[agent];
  TurnPhase& phase = state.phase;
  ++state.step_count;

  switch (phase.substep) {
    case Substep::kPeek1:
      if (action.kind == ActionKind::kEndGame) {
        finish(state, /*early=*/true, events);
        break;
      }
      record_peek(state, agent, action.card, events);
      phase.substep = Substep::kPeek2;
      break;
    case Substep::kPeek2:
      record_peek(state, agent, action.card, events);
      phase.substep = Substep::kMove;
      break;
    case Substep::kMove:
      if (action.kind == ActionKind::kMoveCard) {
        state.board.move_card(action.card, action.cell);
        const int complete = count_complete_colour_clusters(state);
        if (complete > state.max_complete_colours_seen) {
          state.max_complete_colours_seen = complete;
          events.push_back({EventKind::kClusterCountIncreasedBeyondMax, action.card});
        }
      }
      phase.substep = Substep::kHint;
      break;
    case Substep::kHint:
      if (action.kind == ActionKind::kRevealHint) {
        state.hints[action.hint].status = HintStatus::kRevealed;
        end_turn(state);
        break;
      }
      {
        HintCard& hint = state.hints[action.hint];
        const int target = place_target_card(state, action);
        hint.status = HintStatus::kPlaced;
        hint.placed_on = target;
        state.board.locked |= CardMask{1} << target;
        events.push_back({hint_matches(hint, state.board.colours[target])
                              ? EventKind::kHintPlacedCorrect
                              : EventKind::kHintPlacedWrong,
                          target, hint.id});
      }
      if (count_hints(state, HintStatus::kPlaced) == static_cast<int>(state.hints.size())) {
        finish(state, /*early=*/false, events);
      } else {
        end_turn(state);
      }
      break;
  }
  return events;
}

std::pair<GameState, EventList> apply_action(const GameState& state,
                                             std::span<const Action> joint_action) {
  GameState next = state;
  EventList events = step(next, joint_action);
  return {std::move(next), std::move(events)};
}

std::vector<Action> joint_action_for(const GameState& state, int agent,
                                     const Action& action) {
  std::vector<Action> joint(state.config.num_players, Action::no_op());
  joint.at(agent) = action;
  return joint;
}

bool hint_matches(const HintCard& hint, int colour) {
  return (hint.colours >> colour) & 1U;
}

bool check_win(const GameState& state) {
  for (int c = 0; c < state.config.num_colours; ++c) {
    if (!is_connected(state.board.adjacency, state.board.cards_of_colour(c))) return false;
  }
  return true;
}

int count_complete_colour_clusters(const GameState& state) {
  int complete = 0;
  for (int c = 0; c < state.config.num_colours; ++c) {
    if (is_connected(state.board.adjacency, state.board.cards_of_colour(c))) ++complete;
  }
  return complete;
}

int count_hints(const GameState& state, HintStatus status) {
  return static_cast<int>(std::count_if(state.hints.begin(), state.hints.end(),
                                        [&](const HintCard& h) { return h.status == status; }));
}

int count_correct_hints(const GameState& state) {
  int correct = 0;
  for (const HintCard& h : state.hints) {
    if (h.status == HintStatus::kPlaced && hint_matches(h, state.board.colours[h.placed_on])) {
      ++correct;
    }
  }
  return correct;
}

int count_wrong_hints(const GameState& state) {
  return count_hints(state, HintStatus::kPlaced) - count_correct_hints(state);
}

int score_hint_pool(const GameState& state) {
  return 5 * count_hints(state, HintStatus::kFaceDown) +
         2 * count_hints(state, HintStatus::kRevealed) + count_correct_hints(state) -
         count_wrong_hints(state);
}

int compute_score(const GameState& state) {
  if (!state.phase.terminal) throw ContractError("compute_score needs a finished game");
  if (!check_win(state)) throw ContractError("compute_score needs a won game");
  return score_hint_pool(state);
}

}  // namespace yle
