#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "yle/game.hpp"

namespace yle {

enum class MemoryMode : std::uint8_t { kStandard, kPerfect };
enum class Encoding : std::uint8_t { kGraph, kImage };

std::string_view to_string(MemoryMode mode);
std::string_view to_string(Encoding encoding);
MemoryMode parse_memory_mode(std::string_view text);
Encoding parse_encoding(std::string_view text);

// Dense row-major float tensor.
struct Tensor {
  std::vector<int> shape;
  std::vector<float> data;

  Tensor() = default;
  explicit Tensor(std::vector<int> dims);

  std::size_t size() const { return data.size(); }
  float& at(int i, int j) { return data[static_cast<std::size_t>(i) * shape[1] + j]; }
  float at(int i, int j) const { return data[static_cast<std::size_t>(i) * shape[1] + j]; }
  float& at(int i, int j, int k) {
    return data[(static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k];
  }
  float at(int i, int j, int k) const {
    return data[(static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k];
  }
  const float* ptr(int i, int j) const {
    return data.data() + static_cast<std::size_t>(i) * shape[1] + j;
  }
  const float* ptr(int i, int j, int k) const {
    return data.data() + (static_cast<std::size_t>(i) * shape[1] + j) * shape[2] + k;
  }
  bool operator==(const Tensor&) const = default;
};

// Feature channel offsets. Graph nodes share one colour block between cards
// (one-hot) and hints (multi-hot); images keep separate card and hint colour
// blocks.
//
//   graph: [colour x C][row, col][locked][seen][id][is_current_player][substep]
//   image: [card colour x C][hint colour x C][row, col][locked][seen]
//          [is_current_player][substep][id]
struct ChannelLayout {
  int card_colour = 0;
  int hint_colour = 0;
  int position = 0;
  int locked = 0;
  int seen = 0;
  int id = 0;
  int is_current_player = 0;
  int substep = 0;
  int width = 0;

  static ChannelLayout of(Encoding encoding, int num_colours);
};

// Inspection status codes carried by the seen channel.
inline constexpr float kSeenNone = 0.0f;
inline constexpr float kSeenOthersOnly = 1.0f / 3.0f;
inline constexpr float kSeenObserverOnly = 2.0f / 3.0f;
inline constexpr float kSeenBoth = 1.0f;
// Position written for hints that cover no card.
inline constexpr float kHintSentinelPosition = -1.0f;

struct Observation {
  Encoding encoding = Encoding::kGraph;
  int num_cards = 0;
  int num_hints = 0;
  int num_colours = 0;
  int grid_side = 0;
  // Graph only: |Y| x |Y| card adjacency.
  Tensor adjacency;
  // Graph: (|Y| + |H|) x f node features, cards first.
  // Image: g x (g + 1) x f; column g holds hint j at row j.
  Tensor features;

  ChannelLayout channels() const { return ChannelLayout::of(encoding, num_colours); }
  bool operator==(const Observation&) const = default;
};

// Whether `observer` currently sees the colour of `card`.
//   Standard: peeked during the current turn while being the current player,
//             and not locked since.
//   Perfect:  peeked at any time this episode.
bool colour_visible(const GameState& state, int observer, int card, MemoryMode mode);

float seen_code(const GameState& state, int observer, int card);

Observation observe(const GameState& state, int agent, MemoryMode mode,
                    Encoding encoding);

// All agents' observations concatenated on the feature axis, agent order.
Observation world_state(const GameState& state, MemoryMode mode, Encoding encoding);

// Feature block `agent` of a world state.
Observation slice_world_state(const Observation& world, int agent, int num_agents);

int feature_width(const GameConfig& config, Encoding encoding);

}  // namespace yle
