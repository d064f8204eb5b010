#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "yle/action_mask.hpp"
#include "yle/observation.hpp"

namespace yle::wire {

using Json = nlohmann::json;

inline constexpr const char* kProtocol = "yle/1";
// Frames larger than this are refused as malformed.
inline constexpr std::uint32_t kMaxFrameBytes = 64u << 20;

class ProtocolError : public std::runtime_error {
 public:
  ProtocolError(std::string code, const std::string& detail)
      : std::runtime_error(code + ": " + detail), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

// 4-byte big-endian length followed by that many bytes of UTF-8 JSON.
std::string encode_frame(const std::string& payload);

// Blocking frame I/O on a file descriptor. A negative timeout waits forever.
// Throws ProtocolError with code TIMEOUT, CLOSED or MALFORMED.
void write_frame(int fd, const std::string& payload, std::chrono::milliseconds timeout);
std::string read_frame(int fd, std::chrono::milliseconds timeout);

std::string base64_encode(const std::vector<std::uint8_t>& bytes);
std::vector<std::uint8_t> base64_decode(const std::string& text);

// Packed LSB-first bitset, base64 encoded.
std::string encode_mask(const ActionMask& mask);
ActionMask decode_mask(const std::string& text, int size);

Json tensor_to_json(const Tensor& t);
Tensor tensor_from_json(const Json& j);

// {"encoding", "num_cards", "num_hints", "shape", "data",
//  "adjacency"?: {"shape", "data"}}
Json observation_to_json(const Observation& obs);
Observation observation_from_json(const Json& j, int num_colours, int grid_side);

Json config_to_json(const GameConfig& config);
GameConfig config_from_json(const Json& j);

// {"kind": "move", "card": 6, "cell": [6, 5]} and friends; a bare integer is
// read as a canonical index.
Json action_to_json(const Action& action);
Action action_from_json(const Json& j, const ActionLayout& layout);

}  // namespace yle::wire
