#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <bit>

#include "oracle.hpp"
#include "yle/reward.hpp"

namespace yle {
namespace {

const GameConfig kConfig3 = GameConfig::make(Variant::k3x3, 2);

std::vector<Cell> block_cells() {
  std::vector<Cell> cells;
  for (int i = 0; i < 9; ++i) cells.push_back(start_cell(kConfig3, i));
  return cells;
}

TurnPhase over(bool early) {
  TurnPhase phase;
  phase.terminal = true;
  phase.ended_early = early;
  phase.outcome = Outcome{false, 0};
  return phase;
}

HintCard placed(ColourMask colours, int card) {
  HintCard h;
  h.colours = colours;
  h.status = HintStatus::kPlaced;
  h.placed_on = card;
  return h;
}

TEST_CASE("terminal reward substitutions") {
  // Row 0 is a complete colour-0 cluster; colours 1 and 2 are split.
  const std::vector<std::uint8_t> one_complete = {0, 0, 0, 1, 2, 1, 2, 1, 2};
  std::vector<HintCard> hints = draw_hint_deck(kConfig3, 1);
  hints[0] = placed(0b010, 0);  // card 0 is colour 0: wrong
  hints[0].id = 0;
  GameState lost = state_from_layout(kConfig3, block_cells(), one_complete, hints, over(true));
  CHECK(count_complete_colour_clusters(lost) == 1);
  CHECK(terminal_reward(lost) == -4.0);

  // Column 0 complete, colours 1 and 2 each split.
  const std::vector<std::uint8_t> columns = {0, 1, 2, 0, 1, 2, 0, 2, 1};
  GameState natural = state_from_layout(kConfig3, block_cells(), columns,
                                        draw_hint_deck(kConfig3, 1), over(false));
  CHECK(count_complete_colour_clusters(natural) == 1);
  CHECK(terminal_reward(natural) == -2.0);

  GameState state = new_game(kConfig3, 2);
  CHECK_THROWS_AS(terminal_reward(state), ContractError);
}

TEST_CASE("terminal reward with c_a = 2") {
  // Colour 2 has its top-right card cut off by colour 1.
  const std::vector<std::uint8_t> colours = {0, 1, 2, 0, 1, 1, 0, 2, 2};
  GameState state = state_from_layout(kConfig3, block_cells(), colours,
                                      draw_hint_deck(kConfig3, 1), over(false));
  REQUIRE(oracle::complete_colours(state) == 2);
  CHECK(terminal_reward(state) == -1.0);
}

TEST_CASE("won game pays the score") {
  GameState state = new_game(kConfig3, 3);
  const std::vector<std::uint8_t> rows = {0, 0, 0, 1, 1, 1, 2, 2, 2};
  state = state_from_layout(kConfig3, block_cells(), rows, draw_hint_deck(kConfig3, 1), TurnPhase{});
  step(state, joint_action_for(state, 0, Action::end_game()));
  REQUIRE(state.phase.outcome->won);
  CHECK(terminal_reward(state) == state.phase.outcome->score);
}

TEST_CASE("shaped step reward") {
  const EventList peek = {Event{EventKind::kPeekedNewTeamCard, 3}};
  CHECK(shaped_step_reward(peek, 1.0) == 1.0);
  CHECK(shaped_step_reward(peek, 0.0) == 0.0);
  const EventList wrong = {Event{EventKind::kHintPlacedWrong, 1, 0}};
  CHECK(shaped_step_reward(wrong, 0.5) == -0.5);
  const EventList mixed = {Event{EventKind::kPeekedNewTeamCard}, Event{EventKind::kClusterCountIncreasedBeyondMax},
                           Event{EventKind::kHintPlacedCorrect}, Event{EventKind::kGameEnded}};
  CHECK(shaped_step_reward(mixed, 2.0) == 6.0);
  CHECK_THROWS(shaped_step_reward(mixed, -1.0));
}

TEST_CASE("episode totals respect their bounds") {
  Rng rng(17);
  for (Variant v : {Variant::k3x3, Variant::k4x4}) {
    for (int players = 2; players <= 4; ++players) {
      const GameConfig config = GameConfig::make(v, players);
      for (int episode = 0; episode < 40; ++episode) {
        GameState state = new_game(config, rng());
        ShapedCounts total;
        double shaped = 0.0;
        double last_terminal = 0.0;
        while (!state.phase.terminal) {
          const Action a = episode % 4 == 0 ? oracle::random_legal_action(state, rng)
                                            : oracle::random_action_no_end(state, rng);
          const EventList events = step(state, joint_action_for(state, state.phase.current_player, a));
          const RewardBreakdown r = step_reward(state, events, 0.25);
          total += r.shaped;
          shaped += shaped_step_reward(events, 0.25);
          if (state.phase.terminal) last_terminal = r.terminal;
          REQUIRE(r.total == doctest::Approx(r.terminal + 0.25 * r.shaped.net()));
        }
        REQUIRE(total.cluster_max_increase <= config.num_colours);
        REQUIRE(total.hint_correct + total.hint_wrong <= config.num_hints());
        REQUIRE(total.new_card_peek <= config.num_cards);
        REQUIRE(total.new_card_peek == std::popcount(static_cast<unsigned>(
            [&] { CardMask m = 0; for (int p = 0; p < players; ++p) m |= state.peek_history[p]; return m; }())));
        REQUIRE(shaped == doctest::Approx(0.25 * total.net()));
        // Oracle form of the terminal reward.
        const bool won = oracle::win(state) && state.phase.outcome->won;
        int wrong = 0;
        for (const HintCard& h : state.hints) {
          if (h.status == HintStatus::kPlaced && !((h.colours >> state.board.colours[h.placed_on]) & 1U)) ++wrong;
        }
        const double expected = won ? state.phase.outcome->score
                                    : -((state.phase.ended_early ? 1 : 0) +
                                        (config.num_colours - oracle::complete_colours(state)) + wrong);
        REQUIRE(last_terminal == expected);
      }
    }
  }
}

}  // namespace
}  // namespace yle
