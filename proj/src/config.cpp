#include "yle/config.hpp"

#include <sstream>

namespace yle {

int HintDeckSpec::count_of_size(int size) const {
  switch (size) {
    case 1:
      return one_colour;
    case 2:
      return two_colour;
    case 3:
      return three_colour;
    default:
      return 0;
  }
}

HintDeckSpec standard_hint_deck(Variant variant, int num_players) {
  if (num_players < 2 || num_players > 4) {
    throw ConfigError("num_players must be in [2, 4], got " +
                      std::to_string(num_players));
  }
  const int p = num_players - 2;
  if (variant == Variant::k3x3) {
    constexpr int kOne[] = {1, 2, 3};
    return {kOne[p], 3, 0};
  }
  constexpr int kOne[] = {2, 2, 3};
  constexpr int kTwo[] = {3, 4, 4};
  constexpr int kThree[] = {2, 3, 3};
  return {kOne[p], kTwo[p], kThree[p]};
}

GameConfig GameConfig::make(Variant variant, int num_players,
                            HintTargetIndexing indexing, std::uint64_t seed) {
  GameConfig config;
  config.variant = variant;
  const int k = variant == Variant::k3x3 ? 3 : 4;
  config.num_cards = k * k;
  config.num_colours = k;
  config.grid_side = variant == Variant::k3x3 ? 9 : 10;
  config.num_players = num_players;
  config.hint_deck = standard_hint_deck(variant, num_players);
  config.hint_target_indexing = indexing;
  config.seed = seed;
  config.validate();
  return config;
}

namespace {

int binomial(int n, int k) {
  int result = 1;
  for (int i = 1; i <= k; ++i) result = result * (n - k + i) / i;
  return result;
}

}  // namespace

void GameConfig::validate() const {
  const int k = block_side();
  if (num_cards != k * k) {
    throw ConfigError("num_cards must be " + std::to_string(k * k) + " for " +
                      std::string(to_string(variant)));
  }
  if (num_colours != k) {
    throw ConfigError("num_colours must be " + std::to_string(k) + " for " +
                      std::string(to_string(variant)));
  }
  const int expected_side = variant == Variant::k3x3 ? 9 : 10;
  if (grid_side != expected_side) {
    throw ConfigError("grid_side must be " + std::to_string(expected_side) +
                      " for " + std::string(to_string(variant)));
  }
  if (num_players < 2 || num_players > kMaxPlayers) {
    throw ConfigError("num_players must be in [2, 4]");
  }
  if (hint_deck.one_colour < 0 || hint_deck.two_colour < 0 ||
      hint_deck.three_colour < 0) {
    throw ConfigError("hint counts must be non-negative");
  }
  if (variant == Variant::k3x3 && hint_deck.three_colour != 0) {
    throw ConfigError("3x3 decks have no three-colour hints");
  }
  for (int size = 1; size <= 3; ++size) {
    if (hint_deck.count_of_size(size) > binomial(num_colours, size)) {
      throw ConfigError("more " + std::to_string(size) +
                        "-colour hints than distinct colour sets");
    }
  }
  if (num_hints() < 1 || num_hints() > kMaxHints) {
    throw ConfigError("hint deck must hold between 1 and 10 cards");
  }
  // Every hint must be placeable on a distinct card while one card stays
  // free to peek on the final turn.
  if (num_hints() >= num_cards - 1) {
    throw ConfigError("hint deck too large for the card count");
  }
}

std::string GameConfig::digest() const {
  std::ostringstream out;
  out << to_string(variant) << "/p" << num_players << "/h" << hint_deck.one_colour
      << "-" << hint_deck.two_colour << "-" << hint_deck.three_colour << "/"
      << to_string(hint_target_indexing);
  return out.str();
}

std::string_view to_string(Variant variant) {
  return variant == Variant::k3x3 ? "3x3" : "4x4";
}

Variant parse_variant(std::string_view text) {
  if (text == "3x3") return Variant::k3x3;
  if (text == "4x4") return Variant::k4x4;
  throw ConfigError("unknown variant '" + std::string(text) +
                    "' (expected 3x3 or 4x4)");
}

std::string_view to_string(HintTargetIndexing indexing) {
  return indexing == HintTargetIndexing::kCell ? "cell" : "card";
}

HintTargetIndexing parse_hint_target_indexing(std::string_view text) {
  if (text == "cell") return HintTargetIndexing::kCell;
  if (text == "card") return HintTargetIndexing::kCard;
  throw ConfigError("unknown hint target indexing '" + std::string(text) + "'");
}

}  // namespace yle
