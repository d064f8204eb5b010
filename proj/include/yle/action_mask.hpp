#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "yle/action.hpp"
#include "yle/game.hpp"

namespace yle {

// Legality bit-vector over the canonical action layout, one byte per action.
class ActionMask {
 public:
  ActionMask() = default;
  explicit ActionMask(int size) : bits_(static_cast<std::size_t>(size), 0) {}

  int size() const { return static_cast<int>(bits_.size()); }
  bool test(int index) const { return bits_[static_cast<std::size_t>(index)] != 0; }
  void set(int index, bool value = true) {
    bits_[static_cast<std::size_t>(index)] = value ? 1 : 0;
  }
  int count() const;
  bool any() const { return count() > 0; }
  // Set indices in ascending order.
  std::vector<int> indices() const;
  // Index of the k-th set bit (k counted from zero).
  int nth_set(int k) const;

  const std::vector<std::uint8_t>& bytes() const { return bits_; }

  // Packed bitset, bit i at byte i / 8, position i % 8 (LSB first).
  std::vector<std::uint8_t> pack() const;
  static ActionMask unpack(const std::vector<std::uint8_t>& packed, int size);

  bool operator==(const ActionMask&) const = default;

 private:
  std::vector<std::uint8_t> bits_;
};

// Exactly the actions apply_action accepts from `agent` in `state`.
ActionMask legal_mask(const GameState& state, int agent);

// Writes the mask into a preallocated buffer of layout.size bytes.
void fill_legal_mask(const GameState& state, int agent, const ActionLayout& layout,
                     std::uint8_t* out);

}  // namespace yle
