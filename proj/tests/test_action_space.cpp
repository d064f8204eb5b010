#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "oracle.hpp"
#include "yle/action.hpp"
#include "yle/action_mask.hpp"

namespace yle {
namespace {

// N_a = 1 + |Y| + g^2 |Y| + |H| + |H| T + 1, evaluated directly.
int formula(int cards, int g, int hints, int targets) {
  return 1 + cards + g * g * cards + hints + hints * targets + 1;
}

TEST_CASE("action counts") {
  CHECK(action_count(GameConfig::make(Variant::k3x3, 2)) == 1068);
  CHECK(formula(9, 9, 4, 81) == 1068);
  CHECK(action_count(GameConfig::make(Variant::k3x3, 2, HintTargetIndexing::kCard)) == 780);
  CHECK(formula(9, 9, 4, 9) == 780);
  CHECK(action_count(GameConfig::make(Variant::k4x4, 2)) == 2325);
  CHECK(formula(16, 10, 7, 100) == 2325);
  CHECK(action_count(GameConfig::make(Variant::k4x4, 2, HintTargetIndexing::kCard)) == 1737);
  for (Variant v : {Variant::k3x3, Variant::k4x4}) {
    for (int p = 2; p <= 4; ++p) {
      for (auto ix : {HintTargetIndexing::kCell, HintTargetIndexing::kCard}) {
        const GameConfig c = GameConfig::make(v, p, ix);
        const int targets = ix == HintTargetIndexing::kCell ? c.grid_cells() : c.num_cards;
        CHECK(action_count(c) == formula(c.num_cards, c.grid_side, c.num_hints(), targets));
      }
    }
  }
}

TEST_CASE("layout endpoints and block order") {
  const GameConfig config = GameConfig::make(Variant::k3x3, 2);
  CHECK(decode(0, config) == Action::end_game());
  CHECK(decode(1067, config) == Action::no_op());
  CHECK(decode(1, config) == Action::observe(0));
  CHECK(decode(10, config) == Action::move(0, {0, 0}));
  CHECK(decode(11, config) == Action::move(0, {0, 1}));
  CHECK(decode(10 + 81, config) == Action::move(1, {0, 0}));
  CHECK(decode(739, config) == Action::reveal(0));
  CHECK(decode(743, config) == Action::place_on_cell(0, {0, 0}));
  CHECK(decode(743 + 81, config) == Action::place_on_cell(1, {0, 0}));
  CHECK_THROWS_AS(decode(-1, config), ActionIndexError);
  CHECK_THROWS_AS(decode(1068, config), ActionIndexError);
  CHECK_THROWS_AS(encode(Action::observe(9), config), ActionIndexError);
  CHECK_THROWS_AS(encode(Action::move(0, {9, 0}), config), ActionIndexError);
}

TEST_CASE("encode and decode are inverse over every index") {
  for (Variant v : {Variant::k3x3, Variant::k4x4}) {
    for (auto ix : {HintTargetIndexing::kCell, HintTargetIndexing::kCard}) {
      const GameConfig config = GameConfig::make(v, 4, ix);
      const ActionLayout layout = ActionLayout::of(config);
      for (int k = 0; k < layout.size; ++k) {
        REQUIRE(layout.encode(layout.decode(k)) == k);
      }
    }
  }
}

TEST_CASE("fresh game masks") {
  const GameConfig config = GameConfig::make(Variant::k3x3, 2);
  const GameState state = new_game(config, 0);
  const ActionMask active = legal_mask(state, 0);
  CHECK(active.count() == 10);
  CHECK(active.test(0));
  for (int i = 1; i <= 9; ++i) CHECK(active.test(i));
  const ActionMask inactive = legal_mask(state, 1);
  CHECK(inactive.count() == 1);
  CHECK(inactive.test(1067));
}

TEST_CASE("packed masks round-trip") {
  const GameConfig config = GameConfig::make(Variant::k3x3, 2);
  Rng rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    const GameState state = oracle::random_reachable_state(config, rng);
    const ActionMask mask = legal_mask(state, state.phase.current_player);
    CHECK(ActionMask::unpack(mask.pack(), mask.size()) == mask);
  }
}

// Every index is decoded and submitted; a set bit must be accepted and a
// clear bit refused.
int sweep_violations(const GameState& state, int agent) {
  const ActionMask mask = legal_mask(state, agent);
  const ActionLayout layout = ActionLayout::of(state.config);
  int violations = 0;
  for (int k = 0; k < layout.size; ++k) {
    bool accepted = true;
    try {
      if (agent == state.phase.current_player) {
        GameState probe = state;
        step(probe, joint_action_for(probe, agent, layout.decode(k)));
      } else {
        // Inactive seats are judged on their own component of the joint
        // action.
        validate_action(state, agent, layout.decode(k));
      }
    } catch (const IllegalAction&) {
      accepted = false;
    }
    violations += accepted != mask.test(k);
  }
  return violations;
}

TEST_CASE("mask agrees with the engine on random states") {
  Rng rng(12);
  for (Variant v : {Variant::k3x3, Variant::k4x4}) {
    for (auto ix : {HintTargetIndexing::kCell, HintTargetIndexing::kCard}) {
      const GameConfig config = GameConfig::make(v, 3, ix);
      for (int trial = 0; trial < 15; ++trial) {
        const GameState state = oracle::random_reachable_state(config, rng);
        for (int agent = 0; agent < config.num_players; ++agent) {
          REQUIRE(sweep_violations(state, agent) == 0);
        }
        REQUIRE(legal_mask(state, state.phase.current_player).any());
      }
    }
  }
}

TEST_CASE("PlaceHint on empty or locked cells is masked (cell indexing)") {
  const GameConfig config = GameConfig::make(Variant::k3x3, 2);
  GameState state = new_game(config, 21);
  Rng rng(1);
  // Drive to the Hint substep with one hint revealed, then another turn.
  auto play = [&](const Action& a) {
    step(state, joint_action_for(state, state.phase.current_player, a));
  };
  play(Action::observe(0));
  play(Action::observe(1));
  play(Action::move(0, cells_of(legal_move_targets(state, 0), 9).front()));
  play(Action::reveal(0));
  play(Action::observe(2));
  play(Action::observe(3));
  play(Action::move(2, cells_of(legal_move_targets(state, 2), 9).front()));
  play(Action::place_on_cell(0, state.board.positions[4]));
  REQUIRE(state.board.is_locked(4));
  play(Action::observe(5));
  play(Action::observe(6));
  play(Action::move(5, cells_of(legal_move_targets(state, 5), 9).front()));
  play(Action::reveal(1));
  play(Action::observe(7));
  play(Action::observe(8));
  play(Action::move(7, cells_of(legal_move_targets(state, 7), 9).front()));
  const ActionMask mask = legal_mask(state, state.phase.current_player);
  const ActionLayout layout = ActionLayout::of(config);
  CHECK_FALSE(mask.test(layout.encode(Action::place_on_cell(1, state.board.positions[4]))));
  CHECK_FALSE(mask.test(layout.encode(Action::place_on_cell(1, {0, 0}))));
  CHECK(mask.test(layout.encode(Action::place_on_cell(1, state.board.positions[3]))));
}

}  // namespace
}  // namespace yle
