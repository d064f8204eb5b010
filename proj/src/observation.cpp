#include "yle/observation.hpp"

#include <numeric>
#include <stdexcept>
#include <string>

namespace yle {

std::string_view to_string(MemoryMode mode) {
  return mode == MemoryMode::kStandard ? "standard" : "perfect";
}

std::string_view to_string(Encoding encoding) {
  return encoding == Encoding::kGraph ? "graph" : "image";
}

MemoryMode parse_memory_mode(std::string_view text) {
  if (text == "standard") return MemoryMode::kStandard;
  if (text == "perfect") return MemoryMode::kPerfect;
  throw std::invalid_argument("unknown memory mode '" + std::string(text) + "'");
}

Encoding parse_encoding(std::string_view text) {
  if (text == "graph") return Encoding::kGraph;
  if (text == "image") return Encoding::kImage;
  throw std::invalid_argument("unknown encoding '" + std::string(text) + "'");
}

Tensor::Tensor(std::vector<int> dims) : shape(std::move(dims)) {
  const std::size_t n = std::accumulate(shape.begin(), shape.end(), std::size_t{1},
                                        [](std::size_t a, int b) { return a * b; });
  data.assign(n, 0.0f);
}

ChannelLayout ChannelLayout::of(Encoding encoding, int num_colours) {
  ChannelLayout c;
  const int n = num_colours;
  if (encoding == Encoding::kGraph) {
    c.card_colour = 0;
    c.hint_colour = 0;
    c.position = n;
    c.locked = n + 2;
    c.seen = n + 3;
    c.id = n + 4;
    c.is_current_player = n + 5;
    c.substep = n + 6;
    c.width = n + 7;
  } else {
    c.card_colour = 0;
    c.hint_colour = n;
    c.position = 2 * n;
    c.locked = 2 * n + 2;
    c.seen = 2 * n + 3;
    c.is_current_player = 2 * n + 4;
    c.substep = 2 * n + 5;
    c.id = 2 * n + 6;
    c.width = 2 * n + 7;
  }
  return c;
}

int feature_width(const GameConfig& config, Encoding encoding) {
  return ChannelLayout::of(encoding, config.num_colours).width;
}

bool colour_visible(const GameState& state, int observer, int card, MemoryMode mode) {
  if (mode == MemoryMode::kPerfect) return (state.peek_history[observer] >> card) & 1U;
  const TurnPhase& phase = state.phase;
  if (phase.terminal || observer != phase.current_player) return false;
  if (state.board.is_locked(card)) return false;
  for (int p = 0; p < phase.num_peeked; ++p) {
    if (phase.peeked[p] == card) return true;
  }
  return false;
}

float seen_code(const GameState& state, int observer, int card) {
  const unsigned mask = state.team_peeked[card];
  const bool self = (mask >> observer) & 1U;
  const bool others = (mask & ~(1U << observer)) != 0;
  if (self && others) return kSeenBoth;
  if (self) return kSeenObserverOnly;
  if (others) return kSeenOthersOnly;
  return kSeenNone;
}

namespace {

// Writes one node's features at `out` (width channels).
struct NodeWriter {
  const GameState& state;
  int observer;
  MemoryMode mode;
  ChannelLayout channels;
  float is_current;
  float substep;

  float norm(int v) const {
    return static_cast<float>(v) / static_cast<float>(state.config.grid_side - 1);
  }

  void card(int i, float* out) const {
    const BoardState& board = state.board;
    if (colour_visible(state, observer, i, mode)) out[channels.card_colour + board.colours[i]] = 1.0f;
    out[channels.position] = norm(board.positions[i].row);
    out[channels.position + 1] = norm(board.positions[i].col);
    out[channels.locked] = board.is_locked(i) ? 1.0f : 0.0f;
    out[channels.seen] = seen_code(state, observer, i);
    out[channels.id] = static_cast<float>(i + 1) / static_cast<float>(state.config.num_cards);
    out[channels.is_current_player] = is_current;
    out[channels.substep] = substep;
  }

  void hint(const HintCard& h, float* out) const {
    if (h.status != HintStatus::kFaceDown) {
      for (int c = 0; c < state.config.num_colours; ++c) {
        if ((h.colours >> c) & 1U) out[channels.hint_colour + c] = 1.0f;
      }
    }
    if (h.status == HintStatus::kPlaced) {
      const Cell at = state.board.positions[h.placed_on];
      out[channels.position] = norm(at.row);
      out[channels.position + 1] = norm(at.col);
      out[channels.locked] = 1.0f;
    } else {
      out[channels.position] = kHintSentinelPosition;
      out[channels.position + 1] = kHintSentinelPosition;
    }
    out[channels.id] =
        static_cast<float>(h.id + 1) / static_cast<float>(state.hints.size());
    out[channels.is_current_player] = is_current;
    out[channels.substep] = substep;
  }
};

}  // namespace

Observation observe(const GameState& state, int agent, MemoryMode mode,
                    Encoding encoding) {
  if (agent < 0 || agent >= state.config.num_players) {
    throw std::out_of_range("observer index out of range");
  }
  const GameConfig& config = state.config;
  Observation obs;
  obs.encoding = encoding;
  obs.num_cards = config.num_cards;
  obs.num_hints = static_cast<int>(state.hints.size());
  obs.num_colours = config.num_colours;
  obs.grid_side = config.grid_side;
  const ChannelLayout channels = ChannelLayout::of(encoding, config.num_colours);
  const NodeWriter writer{state,
                          agent,
                          mode,
                          channels,
                          agent == state.phase.current_player && !state.phase.terminal ? 1.0f
                                                                                       : 0.0f,
                          static_cast<float>(static_cast<int>(state.phase.substep) + 1) / 4.0f};
  const int f = channels.width;

  if (encoding == Encoding::kGraph) {
    obs.adjacency = Tensor({config.num_cards, config.num_cards});
    for (int i = 0; i < config.num_cards; ++i) {
      for_each_bit(state.board.adjacency[i], [&](int j) { obs.adjacency.at(i, j) = 1.0f; });
    }
    obs.features = Tensor({config.num_cards + obs.num_hints, f});
    for (int i = 0; i < config.num_cards; ++i) writer.card(i, &obs.features.at(i, 0));
    for (const HintCard& h : state.hints) {
      writer.hint(h, &obs.features.at(config.num_cards + h.id, 0));
    }
    return obs;
  }

  const int g = config.grid_side;
  obs.features = Tensor({g, g + 1, f});
  for (int i = 0; i < config.num_cards; ++i) {
    const Cell at = state.board.positions[i];
    float* cell = &obs.features.at(at.row, at.col, 0);
    writer.card(i, cell);
  }
  for (const HintCard& h : state.hints) {
    writer.hint(h, &obs.features.at(h.id, g, 0));
    // The covering hint's colours are public at the card's cell as well.
    if (h.status == HintStatus::kPlaced) {
      const Cell at = state.board.positions[h.placed_on];
      for (int c = 0; c < config.num_colours; ++c) {
        if ((h.colours >> c) & 1U) obs.features.at(at.row, at.col, channels.hint_colour + c) = 1.0f;
      }
    }
  }
  return obs;
}

Observation world_state(const GameState& state, MemoryMode mode, Encoding encoding) {
  const int n = state.config.num_players;
  std::vector<Observation> parts;
  parts.reserve(n);
  for (int agent = 0; agent < n; ++agent) parts.push_back(observe(state, agent, mode, encoding));

  Observation world = parts.front();
  const int f = parts.front().features.shape.back();
  std::vector<int> shape = world.features.shape;
  shape.back() = f * n;
  world.features = Tensor(shape);
  const std::size_t rows = parts.front().features.size() / f;
  for (std::size_t r = 0; r < rows; ++r) {
    for (int agent = 0; agent < n; ++agent) {
      const float* src = parts[agent].features.data.data() + r * f;
      float* dst = world.features.data.data() + r * f * n + static_cast<std::size_t>(agent) * f;
      std::copy(src, src + f, dst);
    }
  }
  return world;
}

Observation slice_world_state(const Observation& world, int agent, int num_agents) {
  Observation out = world;
  const int total = world.features.shape.back();
  const int f = total / num_agents;
  std::vector<int> shape = world.features.shape;
  shape.back() = f;
  out.features = Tensor(shape);
  const std::size_t rows = world.features.size() / total;
  for (std::size_t r = 0; r < rows; ++r) {
    const float* src = world.features.data.data() + r * total + static_cast<std::size_t>(agent) * f;
    std::copy(src, src + f, out.features.data.data() + r * f);
  }
  return out;
}

}  // namespace yle
