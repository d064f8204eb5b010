#include "yle/wire.hpp"

#include <cerrno>
#include <cstring>

#include <poll.h>
#include <unistd.h>

#include <boost/beast/core/detail/base64.hpp>

namespace yle::wire {

namespace b64 = boost::beast::detail::base64;
using Clock = std::chrono::steady_clock;

std::string encode_frame(const std::string& payload) {
  const auto n = static_cast<std::uint32_t>(payload.size());
  std::string out;
  out.reserve(payload.size() + 4);
  out.push_back(static_cast<char>(n >> 24));
  out.push_back(static_cast<char>(n >> 16));
  out.push_back(static_cast<char>(n >> 8));
  out.push_back(static_cast<char>(n));
  out += payload;
  return out;
}

namespace {

int remaining_ms(Clock::time_point deadline, bool forever) {
  if (forever) return -1;
  const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - Clock::now());
  return static_cast<int>(std::max<long long>(0, left.count()));
}

void wait_ready(int fd, short events, Clock::time_point deadline, bool forever) {
  pollfd p{fd, events, 0};
  for (;;) {
    const int r = ::poll(&p, 1, remaining_ms(deadline, forever));
    if (r > 0) return;
    if (r == 0) throw ProtocolError("TIMEOUT", "peer did not respond in time");
    if (errno != EINTR) throw ProtocolError("CLOSED", std::strerror(errno));
  }
}

}  // namespace

void write_frame(int fd, const std::string& payload, std::chrono::milliseconds timeout) {
  const std::string frame = encode_frame(payload);
  const bool forever = timeout.count() < 0;
  const auto deadline = Clock::now() + timeout;
  std::size_t done = 0;
  while (done < frame.size()) {
    wait_ready(fd, POLLOUT, deadline, forever);
    const ssize_t n = ::write(fd, frame.data() + done, frame.size() - done);
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw ProtocolError("CLOSED", std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

namespace {

void read_exact(int fd, char* out, std::size_t size, Clock::time_point deadline, bool forever) {
  std::size_t done = 0;
  while (done < size) {
    wait_ready(fd, POLLIN, deadline, forever);
    const ssize_t n = ::read(fd, out + done, size - done);
    if (n == 0) throw ProtocolError("CLOSED", "peer closed the stream");
    if (n < 0) {
      if (errno == EINTR || errno == EAGAIN) continue;
      throw ProtocolError("CLOSED", std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

}  // namespace

std::string read_frame(int fd, std::chrono::milliseconds timeout) {
  const bool forever = timeout.count() < 0;
  const auto deadline = Clock::now() + timeout;
  unsigned char header[4];
  read_exact(fd, reinterpret_cast<char*>(header), 4, deadline, forever);
  const std::uint32_t n = (std::uint32_t{header[0]} << 24) | (std::uint32_t{header[1]} << 16) |
                          (std::uint32_t{header[2]} << 8) | header[3];
  if (n > kMaxFrameBytes) throw ProtocolError("MALFORMED", "frame too large");
  std::string payload(n, '\0');
  read_exact(fd, payload.data(), n, deadline, forever);
  return payload;
}

std::string base64_encode(const std::vector<std::uint8_t>& bytes) {
  std::string out(b64::encoded_size(bytes.size()), '\0');
  out.resize(b64::encode(out.data(), bytes.data(), bytes.size()));
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  std::vector<std::uint8_t> out(b64::decoded_size(text.size()));
  const auto [written, read] = b64::decode(out.data(), text.data(), text.size());
  // Decoding stops at padding; anything else left over is invalid.
  if (text.size() % 4 != 0 || text.find_first_not_of('=', read) != std::string::npos) {
    throw ProtocolError("MALFORMED", "invalid base64");
  }
  out.resize(written);
  return out;
}

std::string encode_mask(const ActionMask& mask) { return base64_encode(mask.pack()); }

ActionMask decode_mask(const std::string& text, int size) {
  const std::vector<std::uint8_t> packed = base64_decode(text);
  if (packed.size() != static_cast<std::size_t>((size + 7) / 8)) {
    throw ProtocolError("MALFORMED", "mask has the wrong length");
  }
  return ActionMask::unpack(packed, size);
}

Json tensor_to_json(const Tensor& t) { return Json{{"shape", t.shape}, {"data", t.data}}; }

Tensor tensor_from_json(const Json& j) {
  Tensor t(j.at("shape").get<std::vector<int>>());
  std::vector<float> data = j.at("data").get<std::vector<float>>();
  if (data.size() != t.size()) throw ProtocolError("MALFORMED", "tensor data does not match shape");
  t.data = std::move(data);
  return t;
}

Json observation_to_json(const Observation& obs) {
  Json j = tensor_to_json(obs.features);
  j["encoding"] = std::string(to_string(obs.encoding));
  j["num_cards"] = obs.num_cards;
  j["num_hints"] = obs.num_hints;
  if (obs.encoding == Encoding::kGraph) j["adjacency"] = tensor_to_json(obs.adjacency);
  return j;
}

Observation observation_from_json(const Json& j, int num_colours, int grid_side) {
  Observation obs;
  obs.encoding = parse_encoding(j.at("encoding").get<std::string>());
  obs.features = tensor_from_json(j);
  obs.num_colours = num_colours;
  obs.grid_side = grid_side;
  obs.num_cards = j.at("num_cards").get<int>();
  obs.num_hints = j.at("num_hints").get<int>();
  if (obs.encoding == Encoding::kGraph) obs.adjacency = tensor_from_json(j.at("adjacency"));
  return obs;
}

Json config_to_json(const GameConfig& config) {
  return Json{{"variant", std::string(to_string(config.variant))},
              {"players", config.num_players},
              {"hint_targets", std::string(to_string(config.hint_target_indexing))},
              {"digest", config.digest()}};
}

GameConfig config_from_json(const Json& j) {
  return GameConfig::make(parse_variant(j.at("variant").get<std::string>()), j.at("players").get<int>(),
                          parse_hint_target_indexing(j.value("hint_targets", std::string("cell"))),
                          j.value("seed", std::uint64_t{0}));
}

Action action_from_json(const Json& j, const ActionLayout& layout) {
  if (j.is_number_integer()) return layout.decode(j.get<int>());
  const std::string kind = j.at("kind");
  auto cell = [&] {
    const auto rc = j.at("cell").get<std::vector<int>>();
    return Cell{rc.at(0), rc.at(1)};
  };
  if (kind == "end_game") return Action::end_game();
  if (kind == "no_op") return Action::no_op();
  if (kind == "observe") return Action::observe(j.at("card"));
  if (kind == "move") return Action::move(j.at("card"), cell());
  if (kind == "reveal") return Action::reveal(j.at("hint"));
  if (kind == "place") {
    return j.contains("cell") ? Action::place_on_cell(j.at("hint"), cell())
                              : Action::place_on_card(j.at("hint"), j.at("card"));
  }
  throw std::invalid_argument("unknown action kind '" + kind + "'");
}

Json action_to_json(const Action& a) {
  switch (a.kind) {
    case ActionKind::kNoOp: return {{"kind", "no_op"}};
    case ActionKind::kEndGame: return {{"kind", "end_game"}};
    case ActionKind::kObserveCard: return {{"kind", "observe"}, {"card", a.card}};
    case ActionKind::kMoveCard: return {{"kind", "move"}, {"card", a.card}, {"cell", {a.cell.row, a.cell.col}}};
    case ActionKind::kRevealHint: return {{"kind", "reveal"}, {"hint", a.hint}};
    case ActionKind::kPlaceHint:
      if (a.cell.row >= 0) return {{"kind", "place"}, {"hint", a.hint}, {"cell", {a.cell.row, a.cell.col}}};
      return {{"kind", "place"}, {"hint", a.hint}, {"card", a.card}};
  }
  return {};
}

}  // namespace yle::wire
