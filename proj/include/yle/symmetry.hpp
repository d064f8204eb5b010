#pragma once

#include <array>
#include <cstdint>
#include <string_view>
#include <vector>

#include "yle/action.hpp"
#include "yle/action_mask.hpp"
#include "yle/game.hpp"
#include "yle/observation.hpp"

namespace yle {

enum class Rotation : std::uint8_t { kR0, kR90, kR180, kR270 };
enum class SymmetryMode : std::uint8_t { kNone, kColourOnly, kColourAndRotation };

std::string_view to_string(Rotation rotation);
std::string_view to_string(SymmetryMode mode);
SymmetryMode parse_symmetry_mode(std::string_view text);

// Maps the environment frame to one agent's frame. colour_perm[c] is the
// agent-frame colour of environment colour c. Card and hint indices are the
// same in every frame.
struct Symmetry {
  int num_colours = 0;
  std::array<std::uint8_t, kMaxColours> colour_perm{0, 1, 2, 3};
  Rotation rotation = Rotation::kR0;

  static Symmetry identity(int num_colours);
  bool is_identity() const;
  bool operator==(const Symmetry&) const = default;
};

Symmetry inverse(const Symmetry& sym);
// Applies `first`, then `second`.
Symmetry compose(const Symmetry& first, const Symmetry& second);

// R90 sends (r, c) to (c, g - 1 - r).
Cell rotate_cell(Cell cell, Rotation rotation, int grid_side);

// One independent draw per agent. kNone gives identities and kColourOnly
// keeps R0.
std::vector<Symmetry> sample_symmetries(const GameConfig& config, SymmetryMode mode,
                                        std::uint64_t seed);

Observation transform_observation(const Observation& obs, const Symmetry& sym);

// Action written in the agent's frame, mapped back to the environment.
Action transform_action_to_env(const Action& action, const Symmetry& sym, int grid_side);
Action transform_action_to_agent(const Action& action, const Symmetry& sym, int grid_side);

ActionMask transform_mask_to_agent(const ActionMask& mask, const ActionLayout& layout,
                                   const Symmetry& sym);

// The whole game seen through `sym`. Stepping this state with agent-frame
// actions tracks the real game.
GameState transform_state(const GameState& state, const Symmetry& sym);

}  // namespace yle
