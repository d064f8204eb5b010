#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "yle/game.hpp"
#include "yle/symmetry.hpp"

namespace yle {

inline constexpr const char* kEpisodeSchema = "yle-episode/1";
inline constexpr const char* kProbeSchema = "yle-probe/1";

// Per card: the colour `agent` has seen, or -1.
std::vector<int> knowledge_labels(const GameState& state, int agent);

struct StepRecord {
  int actor = 0;
  Substep substep = Substep::kPeek1;
  int action = 0;  // canonical index, environment frame
  EventList events;
  double reward = 0.0;  // team reward with no shaping
  // Taken before the action.
  std::vector<int> colours;
  std::vector<int> team_peeked;
  std::vector<std::vector<int>> knowledge;  // [agent][card]
  bool operator==(const StepRecord&) const = default;
};

struct TerminalRecord {
  bool won = false;
  bool ended_early = false;
  int score = 0;
  int complete_clusters = 0;
  int length = 0;
  double reward = 0.0;
  bool operator==(const TerminalRecord&) const = default;
};

struct EpisodeRecord {
  GameConfig config;
  std::uint64_t episode = 0;
  std::uint64_t seed = 0;  // new_game seed
  std::vector<std::string> seats;
  SymmetryMode symmetry_mode = SymmetryMode::kNone;
  std::vector<Symmetry> symmetries;
  std::vector<StepRecord> steps;
  std::optional<TerminalRecord> terminal;
  bool aborted = false;
  std::string abort_reason;
  bool operator==(const EpisodeRecord&) const = default;
};

// Incrementally builds a record alongside a running game.
class EpisodeRecorder {
 public:
  EpisodeRecorder(const GameState& start, std::uint64_t episode, std::vector<std::string> seats);
  void set_symmetries(SymmetryMode mode, std::vector<Symmetry> draws);
  // Call with the state before the step and the step's results.
  void record_step(const GameState& before, int actor, int action, const EventList& events,
                   const GameState& after);
  void abort(const std::string& reason);
  const EpisodeRecord& record() const { return record_; }
  EpisodeRecord take() { return std::move(record_); }

 private:
  EpisodeRecord record_;
};

TerminalRecord terminal_record(const GameState& terminal_state);

nlohmann::json to_json(const EpisodeRecord& record);
EpisodeRecord episode_from_json(const nlohmann::json& j);

void write_jsonl(std::ostream& out, const std::vector<EpisodeRecord>& records);
std::vector<EpisodeRecord> read_jsonl(std::istream& in);
void write_jsonl_file(const std::string& path, const std::vector<EpisodeRecord>& records);
std::vector<EpisodeRecord> read_jsonl_file(const std::string& path);

struct ReplayResult {
  bool ok = true;
  std::string mismatch;  // first differing field
};

// Re-simulates from the seed and compares every recorded field.
ReplayResult replay_episode(const EpisodeRecord& record);

// One row per (episode, step, agent). Returns the number of rows written.
std::size_t write_probing_dataset(const std::string& path, const std::vector<EpisodeRecord>& records);

nlohmann::json symmetry_to_json(const Symmetry& sym);
Symmetry symmetry_from_json(const nlohmann::json& j);
nlohmann::json event_to_json(const Event& event);
Event event_from_json(const nlohmann::json& j);
EventKind parse_event_kind(std::string_view text);
Substep parse_substep(std::string_view text);

}  // namespace yle
