#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>

namespace yle {

// Compile-time capacities. The largest supported game is 4x4 with four
// players: 16 cards, 4 colours, a 10x10 grid and 10 hint cards.
inline constexpr int kMaxCards = 16;
inline constexpr int kMaxColours = 4;
inline constexpr int kMaxPlayers = 4;
inline constexpr int kMaxHints = 10;
inline constexpr int kMaxGridSide = 10;
inline constexpr int kMaxGridCells = kMaxGridSide * kMaxGridSide;

enum class Variant : std::uint8_t { k3x3, k4x4 };

// How PlaceHint actions name their target: by grid cell (the default, which
// yields 1,068 actions for two-player 3x3) or directly by card index.
enum class HintTargetIndexing : std::uint8_t { kCell, kCard };

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct HintDeckSpec {
  int one_colour = 0;
  int two_colour = 0;
  int three_colour = 0;

  int total() const { return one_colour + two_colour + three_colour; }
  int count_of_size(int size) const;
  bool operator==(const HintDeckSpec&) const = default;
};

// Standard deck for (variant, players):
//
//               4x4         3x3
//   players   2  3  4     2  3  4
//   1-colour  2  2  3     1  2  3
//   2-colour  3  4  4     3  3  3
//   3-colour  2  3  3     -  -  -
HintDeckSpec standard_hint_deck(Variant variant, int num_players);

struct GameConfig {
  Variant variant = Variant::k3x3;
  int num_cards = 9;
  int num_colours = 3;
  int grid_side = 9;
  int num_players = 2;
  HintDeckSpec hint_deck = {1, 3, 0};
  HintTargetIndexing hint_target_indexing = HintTargetIndexing::kCell;
  std::uint64_t seed = 0;

  // Builds a config with the standard deck and derived sizes.
  static GameConfig make(Variant variant, int num_players,
                         HintTargetIndexing indexing = HintTargetIndexing::kCell,
                         std::uint64_t seed = 0);

  // Throws ConfigError when any size is inconsistent with the variant.
  void validate() const;

  int block_side() const { return variant == Variant::k3x3 ? 3 : 4; }
  int num_hints() const { return hint_deck.total(); }
  int grid_cells() const { return grid_side * grid_side; }
  int max_episode_length() const { return 8 * num_hints(); }

  // Stable textual summary; identical configs produce identical digests.
  std::string digest() const;

  bool operator==(const GameConfig&) const = default;
};

std::string_view to_string(Variant variant);
Variant parse_variant(std::string_view text);
std::string_view to_string(HintTargetIndexing indexing);
HintTargetIndexing parse_hint_target_indexing(std::string_view text);

}  // namespace yle
