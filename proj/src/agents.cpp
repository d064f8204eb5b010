#include "yle/agents.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>

namespace yle {

std::vector<double> one_hot(int size, int index) {
  std::vector<double> p(static_cast<std::size_t>(size), 0.0);
  p[static_cast<std::size_t>(index)] = 1.0;
  return p;
}

std::vector<double> uniform_over(const ActionMask& mask) {
  std::vector<double> p(static_cast<std::size_t>(mask.size()), 0.0);
  const int n = mask.count();
  for (int k : mask.indices()) p[static_cast<std::size_t>(k)] = 1.0 / n;
  return p;
}

PolicyOutput RandomPolicy::act(const Observation& /*obs*/, const ActionMask& mask, Rng& rng) {
  const int n = mask.count();
  if (n == 0) throw PolicyError("empty mask");
  return {mask.nth_set(static_cast<int>(uniform_below(rng, n))), uniform_over(mask)};
}

int AgentView::known_count() const {
  int n = 0;
  for (int i = 0; i < num_cards; ++i) n += known[i] >= 0;
  return n;
}

AgentView decode_view(const Observation& obs) {
  if (obs.encoding != Encoding::kGraph) throw PolicyError("scripted agents read graph observations");
  const ChannelLayout ch = obs.channels();
  if (obs.features.shape[1] != ch.width) throw PolicyError("unexpected feature width");
  AgentView v;
  v.num_cards = obs.num_cards;
  v.num_colours = obs.num_colours;
  v.grid_side = obs.grid_side;
  v.block_side = obs.num_cards / obs.num_colours;
  const int g1 = obs.grid_side - 1;
  auto cell_of = [&](int node) {
    return Cell{static_cast<int>(std::lround(obs.features.at(node, ch.position) * g1)),
                static_cast<int>(std::lround(obs.features.at(node, ch.position + 1) * g1))};
  };
  v.known.fill(-1);
  for (int i = 0; i < obs.num_cards; ++i) {
    v.positions[i] = cell_of(i);
    if (obs.features.at(i, ch.locked) != 0.0f) v.locked |= CardMask{1} << i;
    for (int c = 0; c < obs.num_colours; ++c) {
      if (obs.features.at(i, ch.card_colour + c) != 0.0f) v.known[i] = c;
    }
  }
  for (int j = 0; j < obs.num_hints; ++j) {
    const int node = obs.num_cards + j;
    AgentView::Hint h;
    for (int c = 0; c < obs.num_colours; ++c) {
      if (obs.features.at(node, ch.hint_colour + c) != 0.0f) h.colours |= ColourMask(1U << c);
    }
    if (obs.features.at(node, ch.locked) != 0.0f) {
      h.status = HintStatus::kPlaced;
      const Cell at = cell_of(node);
      for (int i = 0; i < obs.num_cards; ++i) {
        if (v.positions[i] == at) h.placed_on = i;
      }
    } else {
      h.status = h.colours != 0 ? HintStatus::kRevealed : HintStatus::kFaceDown;
    }
    v.hints.push_back(h);
  }
  v.substep = static_cast<Substep>(std::lround(obs.features.at(0, ch.substep) * 4) - 1);
  v.is_current = obs.features.at(0, ch.is_current_player) != 0.0f;
  return v;
}

namespace {

// Sizes of connected groups of cards with colour `colour` under `colours`.
int largest_group(const AgentView& v, const std::array<Cell, kMaxCards>& pos,
                  const std::array<int, kMaxCards>& colours, int colour, int* groups = nullptr) {
  std::array<std::int8_t, kMaxGridCells> grid;
  grid.fill(-1);
  const int g = v.grid_side;
  for (int i = 0; i < v.num_cards; ++i) {
    if (colours[i] == colour) grid[pos[i].row * g + pos[i].col] = static_cast<std::int8_t>(i);
  }
  CardMask visited = 0;
  int best = 0;
  int count = 0;
  std::array<int, kMaxCards> stack{};
  for (int s = 0; s < v.num_cards; ++s) {
    if (colours[s] != colour || ((visited >> s) & 1U)) continue;
    ++count;
    int size = 0, top = 0;
    stack[top++] = s;
    visited |= CardMask{1} << s;
    while (top > 0) {
      const int i = stack[--top];
      ++size;
      const Cell c = pos[i];
      const Cell around[4] = {{c.row - 1, c.col}, {c.row + 1, c.col}, {c.row, c.col - 1}, {c.row, c.col + 1}};
      for (const Cell n : around) {
        if (n.row < 0 || n.col < 0 || n.row >= g || n.col >= g) continue;
        const int j = grid[n.row * g + n.col];
        if (j >= 0 && !((visited >> j) & 1U)) {
          visited |= CardMask{1} << j;
          stack[top++] = j;
        }
      }
    }
    best = std::max(best, size);
  }
  if (groups) *groups = count;
  return best;
}

}  // namespace

int known_cluster_score(const AgentView& view, int moved, Cell to) {
  std::array<Cell, kMaxCards> pos = view.positions;
  if (moved != kNoCard) pos[moved] = to;
  int score = 0;
  for (int c = 0; c < view.num_colours; ++c) score += largest_group(view, pos, view.known, c);
  return score;
}

bool proves_win(const AgentView& view, long node_cap) {
  std::array<int, kMaxCards> colours = view.known;
  std::array<int, kMaxColours> remaining{};
  for (int c = 0; c < view.num_colours; ++c) remaining[c] = view.block_side;
  std::array<ColourMask, kMaxCards> allowed{};
  const ColourMask all = static_cast<ColourMask>((1U << view.num_colours) - 1);
  allowed.fill(all);
  for (const AgentView::Hint& h : view.hints) {
    if (h.status == HintStatus::kPlaced && h.placed_on != kNoCard) allowed[h.placed_on] &= h.colours;
  }
  std::vector<int> unknown;
  for (int i = 0; i < view.num_cards; ++i) {
    if (colours[i] >= 0) {
      if (--remaining[colours[i]] < 0) return false;
      if (!((allowed[i] >> colours[i]) & 1U)) return false;  // trusted hints contradict a peek
    } else {
      unknown.push_back(i);
    }
  }
  long nodes = 0;
  bool aborted = false;
  bool any_leaf = false;
  // Returns false on the first losing completion.
  auto dfs = [&](auto&& self, std::size_t depth) -> bool {
    if (++nodes > node_cap) {
      aborted = true;
      return false;
    }
    if (depth == unknown.size()) {
      any_leaf = true;
      for (int c = 0; c < view.num_colours; ++c) {
        int groups = 0;
        largest_group(view, view.positions, colours, c, &groups);
        if (groups != 1) return false;
      }
      return true;
    }
    const int card = unknown[depth];
    for (int c = 0; c < view.num_colours; ++c) {
      if (remaining[c] == 0 || !((allowed[card] >> c) & 1U)) continue;
      --remaining[c];
      colours[card] = c;
      const bool ok = self(self, depth + 1);
      ++remaining[c];
      colours[card] = -1;
      if (!ok) return false;
    }
    return true;
  };
  const bool all_win = dfs(dfs, 0);
  return all_win && any_leaf && !aborted;
}

PolicyOutput GreedyPolicy::act(const Observation& obs, const ActionMask& mask, Rng& /*rng*/) {
  if (mask.count() == 0) throw PolicyError("empty mask");
  view_ = decode_view(obs);
  const int action = choose(mask);
  return {action, one_hot(mask.size(), action)};
}

int GreedyPolicy::choose(const ActionMask& mask) {
  const ActionLayout layout = ActionLayout::of(context_.config);
  if (layout.size != mask.size()) throw PolicyError("policy was reset for a different config");
  if (mask.count() == 1) return mask.nth_set(0);
  if (mask.test(layout.end_game) && proves_win(view_)) return layout.end_game;
  switch (view_.substep) {
    case Substep::kPeek1:
    case Substep::kPeek2: return choose_peek(mask);
    case Substep::kMove: return choose_move(mask);
    case Substep::kHint: return choose_hint(mask);
  }
  return mask.nth_set(0);
}

int GreedyPolicy::choose_peek(const ActionMask& mask) const {
  const ActionLayout layout = ActionLayout::of(context_.config);
  for (int i = 0; i < view_.num_cards; ++i) {
    if (view_.known[i] < 0 && mask.test(layout.observe_begin + i)) return layout.observe_begin + i;
  }
  for (int i = 0; i < view_.num_cards; ++i) {
    if (mask.test(layout.observe_begin + i)) return layout.observe_begin + i;
  }
  // Nothing peekable: lowest legal non-EndGame action.
  for (int k : mask.indices()) {
    if (k != layout.end_game) return k;
  }
  return layout.end_game;
}

int GreedyPolicy::choose_move(const ActionMask& mask) const {
  const ActionLayout layout = ActionLayout::of(context_.config);
  double cr = 0.0, cc = 0.0;
  for (int i = 0; i < view_.num_cards; ++i) {
    cr += view_.positions[i].row;
    cc += view_.positions[i].col;
  }
  cr /= view_.num_cards;
  cc /= view_.num_cards;
  // Highest known-cluster score; ties go to the cell nearest the card mass,
  // then to the lowest index.
  int best = -1;
  int best_score = std::numeric_limits<int>::min();
  double best_dist = 0.0;
  const int g2 = layout.grid_side * layout.grid_side;
  for (int k = layout.move_begin; k < layout.reveal_begin; ++k) {
    if (!mask.test(k)) continue;
    const int card = (k - layout.move_begin) / g2;
    const int cell = (k - layout.move_begin) % g2;
    const Cell to{cell / layout.grid_side, cell % layout.grid_side};
    const int score = known_cluster_score(view_, card, to);
    const double dist = std::hypot(to.row - cr, to.col - cc);
    if (score > best_score || (score == best_score && dist < best_dist - 1e-9)) {
      best = k;
      best_score = score;
      best_dist = dist;
    }
  }
  return best >= 0 ? best : mask.nth_set(0);
}

int GreedyPolicy::choose_hint(const ActionMask& mask) const {
  const ActionLayout layout = ActionLayout::of(context_.config);
  auto place_index = [&](int hint, int card) {
    const Action a = layout.indexing == HintTargetIndexing::kCell
                         ? Action::place_on_cell(hint, view_.positions[card])
                         : Action::place_on_card(hint, card);
    return layout.encode(a);
  };
  // Size of the known same-colour group containing `card`.
  auto group_size = [&](int card) {
    const int colour = view_.known[card];
    CardMask seen = CardMask{1} << card;
    std::vector<int> frontier = {card};
    while (!frontier.empty()) {
      const int i = frontier.back();
      frontier.pop_back();
      for (int j = 0; j < view_.num_cards; ++j) {
        if (view_.known[j] != colour || ((seen >> j) & 1U)) continue;
        const int d = std::abs(view_.positions[i].row - view_.positions[j].row) +
                      std::abs(view_.positions[i].col - view_.positions[j].col);
        if (d == 1) {
          seen |= CardMask{1} << j;
          frontier.push_back(j);
        }
      }
    }
    return std::popcount(seen);
  };
  for (int h = 0; h < static_cast<int>(view_.hints.size()); ++h) {
    if (view_.hints[h].status != HintStatus::kRevealed) continue;
    int best = -1, best_size = 0;
    for (int i = 0; i < view_.num_cards; ++i) {
      if (view_.known[i] < 0 || !((view_.hints[h].colours >> view_.known[i]) & 1U)) continue;
      const int k = place_index(h, i);
      if (!mask.test(k)) continue;
      const int size = group_size(i);
      if (size > best_size) best = k, best_size = size;
    }
    if (best >= 0) return best;
  }
  for (int h = 0; h < static_cast<int>(view_.hints.size()); ++h) {
    if (mask.test(layout.reveal_begin + h)) return layout.reveal_begin + h;
  }
  // Forced placement: avoid cards known not to match.
  for (int h = 0; h < static_cast<int>(view_.hints.size()); ++h) {
    if (view_.hints[h].status != HintStatus::kRevealed) continue;
    for (int i = 0; i < view_.num_cards; ++i) {
      const int k = place_index(h, i);
      if (!mask.test(k)) continue;
      if (view_.known[i] < 0 || ((view_.hints[h].colours >> view_.known[i]) & 1U)) return k;
    }
  }
  return mask.nth_set(0);
}

std::vector<int> MemoryOraclePolicy::knowledge() const {
  return std::vector<int>(view_.known.begin(), view_.known.begin() + view_.num_cards);
}

}  // namespace yle
