#include "yle/symmetry.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "yle/rng.hpp"

namespace yle {

std::string_view to_string(Rotation rotation) {
  switch (rotation) {
    case Rotation::kR0: return "R0";
    case Rotation::kR90: return "R90";
    case Rotation::kR180: return "R180";
    case Rotation::kR270: return "R270";
  }
  return "?";
}

std::string_view to_string(SymmetryMode mode) {
  switch (mode) {
    case SymmetryMode::kNone: return "none";
    case SymmetryMode::kColourOnly: return "colour";
    case SymmetryMode::kColourAndRotation: return "colour+rotation";
  }
  return "?";
}

SymmetryMode parse_symmetry_mode(std::string_view text) {
  if (text == "none" || text == "sp") return SymmetryMode::kNone;
  if (text == "colour" || text == "c" || text == "op+c") return SymmetryMode::kColourOnly;
  if (text == "colour+rotation" || text == "c+r" || text == "op+c+r") return SymmetryMode::kColourAndRotation;
  throw std::invalid_argument("unknown symmetry mode '" + std::string(text) + "'");
}

Symmetry Symmetry::identity(int num_colours) {
  Symmetry s;
  s.num_colours = num_colours;
  return s;
}

bool Symmetry::is_identity() const {
  for (int c = 0; c < num_colours; ++c) {
    if (colour_perm[c] != c) return false;
  }
  return rotation == Rotation::kR0;
}

Symmetry inverse(const Symmetry& sym) {
  Symmetry out = Symmetry::identity(sym.num_colours);
  for (int c = 0; c < sym.num_colours; ++c) out.colour_perm[sym.colour_perm[c]] = c;
  out.rotation = static_cast<Rotation>((4 - static_cast<int>(sym.rotation)) % 4);
  return out;
}

Symmetry compose(const Symmetry& first, const Symmetry& second) {
  Symmetry out = Symmetry::identity(first.num_colours);
  for (int c = 0; c < first.num_colours; ++c) {
    out.colour_perm[c] = second.colour_perm[first.colour_perm[c]];
  }
  out.rotation = static_cast<Rotation>(
      (static_cast<int>(first.rotation) + static_cast<int>(second.rotation)) % 4);
  return out;
}

Cell rotate_cell(Cell cell, Rotation rotation, int grid_side) {
  for (int k = 0; k < static_cast<int>(rotation); ++k) {
    cell = Cell{cell.col, grid_side - 1 - cell.row};
  }
  return cell;
}

std::vector<Symmetry> sample_symmetries(const GameConfig& config, SymmetryMode mode,
                                        std::uint64_t seed) {
  std::vector<Symmetry> out(config.num_players, Symmetry::identity(config.num_colours));
  if (mode == SymmetryMode::kNone) return out;
  Rng rng(seed);
  for (Symmetry& sym : out) {
    std::span<std::uint8_t> perm(sym.colour_perm.data(), config.num_colours);
    shuffle_in_place(perm, rng);
    if (mode == SymmetryMode::kColourAndRotation) {
      sym.rotation = static_cast<Rotation>(uniform_below(rng, 4));
    }
  }
  return out;
}

namespace {

float norm(int v, int g) { return static_cast<float>(v) / static_cast<float>(g - 1); }
int denorm(float v, int g) { return static_cast<int>(std::lround(v * static_cast<float>(g - 1))); }

// Permutes one colour block and rotates the position pair of a node.
void transform_node(const float* in, float* out, int width, int colour_block,
                    const Symmetry& sym, int position, int g) {
  std::copy(in, in + width, out);
  for (int c = 0; c < sym.num_colours; ++c) {
    out[colour_block + sym.colour_perm[c]] = in[colour_block + c];
  }
  if (in[position] == kHintSentinelPosition) return;
  const Cell at = rotate_cell({denorm(in[position], g), denorm(in[position + 1], g)},
                              sym.rotation, g);
  out[position] = norm(at.row, g);
  out[position + 1] = norm(at.col, g);
}

// Occupied cells and hint rows carry a nonzero id; everything else is zero.
bool occupied(const float* node, const ChannelLayout& ch) { return node[ch.id] != 0.0f; }

}  // namespace

Observation transform_observation(const Observation& obs, const Symmetry& sym) {
  if (sym.num_colours != obs.num_colours) {
    throw std::invalid_argument("symmetry built for a different colour count");
  }
  const ChannelLayout ch = obs.channels();
  const int g = obs.grid_side;
  const int total = obs.features.shape.back();
  if (total % ch.width != 0) throw std::invalid_argument("feature width mismatch");
  const int blocks = total / ch.width;  // >1 for world states
  Observation out = obs;

  if (obs.encoding == Encoding::kGraph) {
    const int nodes = obs.features.shape[0];
    for (int n = 0; n < nodes; ++n) {
      for (int b = 0; b < blocks; ++b) {
        const float* in = obs.features.ptr(n, b * ch.width);
        transform_node(in, &out.features.at(n, b * ch.width), ch.width, ch.card_colour, sym,
                       ch.position, g);
      }
    }
    return out;
  }

  std::fill(out.features.data.begin(), out.features.data.end(), 0.0f);
  for (int r = 0; r < g; ++r) {
    for (int c = 0; c <= g; ++c) {
      const Cell dst = c == g ? Cell{r, g} : rotate_cell({r, c}, sym.rotation, g);
      for (int b = 0; b < blocks; ++b) {
        const float* in = obs.features.ptr(r, c, b * ch.width);
        float* o = &out.features.at(dst.row, dst.col, b * ch.width);
        if (!occupied(in, ch)) continue;
        transform_node(in, o, ch.width, ch.card_colour, sym, ch.position, g);
        for (int k = 0; k < sym.num_colours; ++k) {
          o[ch.hint_colour + sym.colour_perm[k]] = in[ch.hint_colour + k];
        }
      }
    }
  }
  return out;
}

Action transform_action_to_env(const Action& action, const Symmetry& sym, int grid_side) {
  return transform_action_to_agent(action, inverse(sym), grid_side);
}

Action transform_action_to_agent(const Action& action, const Symmetry& sym, int grid_side) {
  Action out = action;
  const bool spatial = action.kind == ActionKind::kMoveCard ||
                       (action.kind == ActionKind::kPlaceHint && action.cell.row >= 0);
  if (spatial) out.cell = rotate_cell(action.cell, sym.rotation, grid_side);
  return out;
}

ActionMask transform_mask_to_agent(const ActionMask& mask, const ActionLayout& layout,
                                   const Symmetry& sym) {
  ActionMask out(mask.size());
  for (int k : mask.indices()) {
    out.set(layout.encode(transform_action_to_agent(layout.decode(k), sym, layout.grid_side)));
  }
  return out;
}

GameState transform_state(const GameState& state, const Symmetry& sym) {
  GameState out = state;
  const int g = state.config.grid_side;
  for (int i = 0; i < state.config.num_cards; ++i) {
    out.board.colours[i] = sym.colour_perm[state.board.colours[i]];
    out.board.positions[i] = rotate_cell(state.board.positions[i], sym.rotation, g);
  }
  out.board.rebuild_derived();
  for (HintCard& h : out.hints) {
    ColourMask mapped = 0;
    for (int c = 0; c < sym.num_colours; ++c) {
      if ((h.colours >> c) & 1U) mapped |= static_cast<ColourMask>(1U << sym.colour_perm[c]);
    }
    h.colours = mapped;
  }
  return out;
}

}  // namespace yle
