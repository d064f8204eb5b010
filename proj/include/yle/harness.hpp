#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "yle/agents.hpp"
#include "yle/records.hpp"
#include "yle/symmetry.hpp"

namespace yle {

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

struct Metrics {
  int episodes = 0;  // completed, aborted excluded
  int aborted = 0;
  double reward_mean = 0.0;  // R, no shaping
  double reward_std = 0.0;
  double success_rate = 0.0;             // SR
  double complete_clusters = 0.0;        // NC
  double successful_early_end = 0.0;     // SEE
  double mean_length = 0.0;
};

// Pure function of the terminal parts of the records.
Metrics compute_metrics(const std::vector<EpisodeRecord>& records);

struct MatchOptions {
  SymmetryMode symmetry = SymmetryMode::kNone;
  // Memory mode for policies that accept either.
  MemoryMode memory = MemoryMode::kStandard;
  bool keep_records = true;
};

struct MatchResult {
  Metrics metrics;
  std::vector<EpisodeRecord> records;
  std::vector<std::string> seat_names;
};

// Episode e uses game seed derive_seed({seed, e, 0}), symmetry seed
// derive_seed({seed, e, 1}) and seat s's sampling seed
// derive_seed({seed, e, 2 + s}). Inactive seats play NoOp.
MatchResult run_matchup(const std::vector<PolicyFactory>& seats, const GameConfig& config,
                        int episodes, std::uint64_t seed, const MatchOptions& options = {});

// Same, with caller-owned policy instances (one per seat).
MatchResult run_matchup(const std::vector<Policy*>& seats, const GameConfig& config, int episodes,
                        std::uint64_t seed, const MatchOptions& options = {});

struct CrossPlayResult {
  std::vector<std::string> names;
  // cells[i][j]: seat 0 plays pool[i], every other seat plays pool[j].
  std::vector<std::vector<Metrics>> cells;
  double self_play_sr = 0.0;   // mean diagonal SR
  double cross_play_sr = 0.0;  // mean off-diagonal SR
  double gap = 0.0;            // SP - XP
};

CrossPlayResult summarise_cross_play(std::vector<std::string> names,
                                     std::vector<std::vector<Metrics>> cells);
CrossPlayResult cross_play(const std::vector<std::pair<std::string, PolicyFactory>>& pool,
                           const GameConfig& config, int episodes_per_pair, std::uint64_t seed,
                           const MatchOptions& options = {});

// Fraction of MoveCard actions whose target cell lies on the grid border.
double border_move_rate(const std::vector<EpisodeRecord>& records);

std::string format_metrics_table(const std::vector<std::pair<std::string, Metrics>>& rows);
nlohmann::json metrics_to_json(const Metrics& m);
std::string format_cross_play(const CrossPlayResult& result);

// ---------------------------------------------------------------------------
// Diagnostic scenarios

struct DiagnosticScenario {
  std::string name;
  GameState state;
  int seat = 0;
  std::vector<int> t0;     // zero-order optimal
  std::vector<int> t1;     // first-order optimal
  std::vector<int> wrong;  // mismatched colours
};

DiagnosticScenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const DiagnosticScenario& scenario);
std::vector<DiagnosticScenario> load_scenarios(const std::string& path);

// Throws std::invalid_argument unless every label is legal and the sets are
// disjoint.
void validate_scenario(const DiagnosticScenario& scenario);

// The scenario seen through `sym`: state and labels transformed together.
DiagnosticScenario transform_scenario(const DiagnosticScenario& scenario, const Symmetry& sym);

// `count` colour/rotation variants drawn from `seed` (the first is the
// original).
std::vector<DiagnosticScenario> scenario_variants(const DiagnosticScenario& scenario, int count,
                                                  std::uint64_t seed);

// Rank of each action by descending probability among legal actions (1 =
// most probable), ties broken by ascending index; 0 for illegal actions.
std::vector<int> action_ranks(const std::vector<double>& probs, const ActionMask& mask);

struct DiagnosticResult {
  double t0_rank = 0.0;
  double t1_rank = 0.0;
  double wrong_rank = 0.0;
  int scenarios = 0;
};

// Mean rank per label class across scenarios. Throws ContractError when the
// policy returns no probabilities.
DiagnosticResult evaluate_diagnostic(Policy& policy, const std::vector<DiagnosticScenario>& scenarios,
                                     std::uint64_t seed = 0);

}  // namespace yle
