#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "yle/action.hpp"
#include "yle/board.hpp"
#include "yle/config.hpp"

namespace yle {

enum class HintStatus : std::uint8_t { kFaceDown, kRevealed, kPlaced };

struct HintCard {
  int id = 0;
  ColourMask colours = 0;
  HintStatus status = HintStatus::kFaceDown;
  int placed_on = kNoCard;

  bool operator==(const HintCard&) const = default;
};

enum class Substep : std::uint8_t { kPeek1, kPeek2, kMove, kHint };

std::string_view to_string(Substep substep);

struct Outcome {
  bool won = false;
  // Score only when won; zero otherwise.
  int score = 0;
  bool operator==(const Outcome&) const = default;
};

struct TurnPhase {
  int current_player = 0;
  Substep substep = Substep::kPeek1;
  std::array<int, 2> peeked{kNoCard, kNoCard};
  int num_peeked = 0;
  bool terminal = false;
  bool ended_early = false;
  std::optional<Outcome> outcome;

  bool operator==(const TurnPhase&) const = default;
};

struct GameState {
  GameConfig config;
  BoardState board;
  std::vector<HintCard> hints;
  TurnPhase phase;
  // Cards each agent has ever peeked this episode. Colours never change, so
  // the (card, colour) pairs are recovered from the board.
  std::array<CardMask, kMaxPlayers> peek_history{};
  // Per card, one bit per agent that has peeked it.
  std::array<std::uint8_t, kMaxCards> team_peeked{};
  int max_complete_colours_seen = 0;
  std::uint64_t seed = 0;
  int step_count = 0;

  bool operator==(const GameState&) const = default;
};

enum class EventKind : std::uint8_t {
  kPeekedNewTeamCard,
  kClusterCountIncreasedBeyondMax,
  kHintPlacedCorrect,
  kHintPlacedWrong,
  kGameEnded,
};

std::string_view to_string(EventKind kind);

struct Event {
  EventKind kind = EventKind::kGameEnded;
  int card = kNoCard;
  int hint = -1;
  bool early = false;
  bool won = false;
  bool operator==(const Event&) const = default;
};

using EventList = std::vector<Event>;

// Why apply_action refused an action. The names double as wire reason codes.
enum class RejectReason : std::uint8_t {
  kGameOver,
  kWrongJointSize,
  kInactiveAgentActed,
  kCurrentPlayerNoOp,
  kWrongPhase,
  kCardOutOfRange,
  kCardLocked,
  kRepeatedPeek,
  kIllegalTarget,
  kHintOutOfRange,
  kHintNotFaceDown,
  kHintNotRevealed,
  kMalformedAction,
};

std::string_view reason_code(RejectReason reason);

class IllegalAction : public std::runtime_error {
 public:
  IllegalAction(RejectReason reason, const std::string& detail);
  RejectReason reason() const { return reason_; }

 private:
  RejectReason reason_;
};

// Raised when an operation is called outside its precondition.
class ContractError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Fresh game: cards in a centred k x k block, colours a seeded shuffle of k
// copies of each colour, hint deck a seeded subset per size category (one-
// colour hints first). Player 0 starts at Peek1.
GameState new_game(const GameConfig& config, std::uint64_t seed);

// Advances the state machine by one joint action (one entry per agent).
// Throws IllegalAction without modifying `state` when the action is refused.
EventList step(GameState& state, std::span<const Action> joint_action);

// Functional form of step().
std::pair<GameState, EventList> apply_action(const GameState& state,
                                             std::span<const Action> joint_action);

// Joint action where `agent` plays `action` and everyone else plays NoOp.
std::vector<Action> joint_action_for(const GameState& state, int agent,
                                     const Action& action);

// Throws IllegalAction if `action` by `agent` would be refused.
void validate_action(const GameState& state, int agent, const Action& action);

CellSet legal_move_targets(const GameState& state, int card);

// True iff some unlocked card has at least one legal target.
bool any_legal_move(const GameState& state);

bool check_win(const GameState& state);
int count_complete_colour_clusters(const GameState& state);

// 5 face-down + 2 revealed-unplaced + correct - wrong. Requires a terminal,
// won state.
int compute_score(const GameState& state);

// Same formula with no precondition; used for outcome bookkeeping and
// display.
int score_hint_pool(const GameState& state);

int count_hints(const GameState& state, HintStatus status);
int count_wrong_hints(const GameState& state);
int count_correct_hints(const GameState& state);

bool hint_matches(const HintCard& hint, int colour);

// Hint decks drawn from the config's table, for tests and fixtures.
std::vector<HintCard> draw_hint_deck(const GameConfig& config, std::uint64_t seed);

// Centred starting block cell for card `index` (row-major within the block).
Cell start_cell(const GameConfig& config, int index);

// Builds a state from an explicit layout at the given phase. Locks are
// derived from placed hints. Validates the layout (in bounds, no overlap,
// connected).
GameState state_from_layout(const GameConfig& config, std::span<const Cell> cells,
                            std::span<const std::uint8_t> colours,
                            std::vector<HintCard> hints, const TurnPhase& phase);

}  // namespace yle
