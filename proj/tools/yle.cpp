// yle: benchmark, evaluate, cross-play, diagnose, export and serve.
#include <csignal>
#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "yle/harness.hpp"
#include "yle/policy_spec.hpp"
#include "yle/server.hpp"
#include "yle/vec_env.hpp"

namespace {

using namespace yle;

struct GameFlags {
  std::string variant = "3x3";
  int players = 2;
  std::string hint_targets = "cell";

  void add(CLI::App* app) {
    app->add_option("--variant", variant, "3x3 or 4x4")->capture_default_str();
    app->add_option("--players", players, "2 to 4")->capture_default_str();
    app->add_option("--hint-targets", hint_targets, "cell or card")->capture_default_str();
  }
  GameConfig config() const {
    return GameConfig::make(parse_variant(variant), players, parse_hint_target_indexing(hint_targets));
  }
};

struct MatchFlags {
  std::string op = "none";
  std::string memory = "standard";

  void add(CLI::App* app) {
    app->add_option("--op", op, "symmetry: none|c|c+r")->capture_default_str();
    app->add_option("--memory", memory, "standard|perfect")->capture_default_str();
  }
  MatchOptions options() const {
    MatchOptions o;
    o.symmetry = parse_symmetry_mode(op);
    o.memory = parse_memory_mode(memory);
    return o;
  }
};

PolicyFactory factory_for(const std::string& spec) {
  check_policy_spec(spec);
  return [spec] { return make_policy(spec); };
}

std::vector<PolicyFactory> seat_factories(const std::vector<std::string>& specs, int players) {
  std::vector<PolicyFactory> seats;
  for (int s = 0; s < players; ++s) seats.push_back(factory_for(specs[std::min<std::size_t>(s, specs.size() - 1)]));
  return seats;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Yokai learning environment"};
  app.set_config("--config", "", "key = value file presetting any flag (flags override it)");
  app.require_subcommand(1);
  app.fallthrough();
  std::uint64_t seed = 0;
  app.add_option("--seed", seed, "master seed")->capture_default_str();

  // bench
  auto* bench = app.add_subcommand("bench", "steps-per-second benchmark");
  GameFlags bench_game;
  bench_game.add(bench);
  std::vector<int> envs = {512, 1024, 2048};
  int bench_steps = 1000;
  bool serial = false;
  std::string bench_out;
  bench->add_option("--envs", envs, "batch sizes")->delimiter(',')->capture_default_str();
  bench->add_option("--steps", bench_steps, "steps per run")->capture_default_str();
  bench->add_flag("--serial", serial, "single-threaded reference stepping");
  bench->add_option("--json", bench_out, "also write a yle-bench/1 report");

  // eval
  auto* eval = app.add_subcommand("eval", "play a matchup and report metrics");
  GameFlags eval_game;
  eval_game.add(eval);
  MatchFlags eval_match;
  eval_match.add(eval);
  std::vector<std::string> seat_specs(kMaxPlayers);
  seat_specs[0] = "greedy";
  seat_specs[1] = "greedy";
  for (int s = 0; s < kMaxPlayers; ++s) {
    eval->add_option("--seat" + std::to_string(s), seat_specs[s], "policy spec for seat " + std::to_string(s));
  }
  int eval_games = 1000;
  std::string eval_records, eval_json;
  eval->add_option("--games", eval_games)->capture_default_str();
  eval->add_option("--records", eval_records, "write episode records as JSONL");
  eval->add_option("--json", eval_json, "write metrics as JSON");

  // crossplay
  auto* xp = app.add_subcommand("crossplay", "cross-play matrix over a policy pool");
  GameFlags xp_game;
  xp_game.add(xp);
  MatchFlags xp_match;
  xp_match.add(xp);
  std::vector<std::string> pool;
  int xp_games = 200;
  xp->add_option("--pool", pool, "policy specs (comma separated)")->delimiter(',')->required();
  xp->add_option("--games", xp_games, "games per cell")->capture_default_str();

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "rank diagnostic on labelled scenarios");
  std::string diag_policy = "greedy", fixtures;
  int variants = 16;
  diag->add_option("--policy", diag_policy)->capture_default_str();
  diag->add_option("--fixtures", fixtures, "scenario JSON file")->required();
  diag->add_option("--variants", variants, "symmetry variants per scenario")->capture_default_str();

  // export
  auto* exp = app.add_subcommand("export", "write episode records and probing rows");
  GameFlags exp_game;
  exp_game.add(exp);
  MatchFlags exp_match;
  exp_match.add(exp);
  std::vector<std::string> exp_seats = {"oracle"};
  int exp_games = 100;
  std::string exp_out, exp_probe;
  exp->add_option("--seats", exp_seats, "policy spec per seat (last one repeats)")->delimiter(',');
  exp->add_option("--games", exp_games)->capture_default_str();
  exp->add_option("--out", exp_out, "episode JSONL")->required();
  exp->add_option("--probe", exp_probe, "probing dataset JSONL");

  // serve
  auto* serve = app.add_subcommand("serve", "turn-based game service (yle-svc/1)");
  GameFlags serve_game;
  serve_game.add(serve);
  std::string listen = "127.0.0.1:8080", partner = "greedy", journal;
  bool casual = false;
  serve->add_option("--listen", listen, "address:port")->capture_default_str();
  serve->add_option("--seat1", partner, "default policy for non-human seats")->capture_default_str();
  serve->add_option("--journal", journal, "append finished games as JSONL");
  serve->add_flag("--casual-memory", casual, "default sessions keep peeked colours visible");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) {
      const GameConfig config = bench_game.config();
      std::vector<BenchReport> reports;
      for (int n : envs) reports.push_back(throughput_bench(config, n, bench_steps, seed, !serial));
      std::cout << format_bench_table(reports);
      if (!bench_out.empty()) write_text(bench_out, bench_json(reports));
    } else if (*eval) {
      const GameConfig config = eval_game.config();
      std::vector<std::string> specs(seat_specs.begin(), seat_specs.begin() + config.num_players);
      for (std::string& s : specs) {
        if (s.empty()) s = specs[1];
      }
      MatchOptions options = eval_match.options();
      options.keep_records = !eval_records.empty();
      const MatchResult result = run_matchup(seat_factories(specs, config.num_players), config, eval_games, seed, options);
      std::string name;
      for (const std::string& s : result.seat_names) name += (name.empty() ? "" : " + ") + s;
      std::cout << format_metrics_table({{name, result.metrics}});
      if (!eval_records.empty()) write_jsonl_file(eval_records, result.records);
      if (!eval_json.empty()) write_text(eval_json, metrics_to_json(result.metrics).dump(2) + "\n");
    } else if (*xp) {
      std::vector<std::pair<std::string, PolicyFactory>> entries;
      for (const std::string& spec : pool) entries.emplace_back(spec, factory_for(spec));
      const CrossPlayResult r = cross_play(entries, xp_game.config(), xp_games, seed, xp_match.options());
      std::cout << format_cross_play(r);
    } else if (*diag) {
      check_policy_spec(diag_policy);
      std::vector<DiagnosticScenario> scenarios;
      for (const DiagnosticScenario& s : load_scenarios(fixtures)) {
        for (DiagnosticScenario& v : scenario_variants(s, variants, seed)) scenarios.push_back(std::move(v));
      }
      auto policy = make_policy(diag_policy);
      const DiagnosticResult r = evaluate_diagnostic(*policy, scenarios, seed);
      double uniform = 0.0;
      for (const DiagnosticScenario& s : scenarios) uniform += (legal_mask(s.state, s.seat).count() + 1) / 2.0;
      uniform /= static_cast<double>(scenarios.size());
      std::printf("%-12s %10s %10s %10s %10s\n", "policy", "T0 rank", "T1 rank", "wrong", "uniform");
      std::printf("%-12s %10.2f %10.2f %10.2f %10.2f\n", policy->name().c_str(), r.t0_rank, r.t1_rank, r.wrong_rank,
                  uniform);
      std::printf("%d scenarios\n", r.scenarios);
    } else if (*exp) {
      const GameConfig config = exp_game.config();
      const MatchResult result =
          run_matchup(seat_factories(exp_seats, config.num_players), config, exp_games, seed, exp_match.options());
      write_jsonl_file(exp_out, result.records);
      std::cout << "wrote " << result.records.size() << " episodes to " << exp_out << '\n';
      if (!exp_probe.empty()) {
        const std::size_t rows = write_probing_dataset(exp_probe, result.records);
        std::cout << "wrote " << rows << " probing rows to " << exp_probe << '\n';
      }
    } else if (*serve) {
      const auto colon = listen.rfind(':');
      if (colon == std::string::npos) throw std::invalid_argument("--listen expects address:port");
      check_policy_spec(partner);
      svc::SessionOptions defaults;
      defaults.config = serve_game.config();
      defaults.casual_memory = casual;
      defaults.seats = {"human", partner};
      svc::SessionManager manager(seed, journal, defaults);
      svc::Server server(manager, {listen.substr(0, colon),
                                   static_cast<unsigned short>(std::stoi(listen.substr(colon + 1)))});
      sigset_t signals;
      sigemptyset(&signals);
      sigaddset(&signals, SIGINT);
      sigaddset(&signals, SIGTERM);
      pthread_sigmask(SIG_BLOCK, &signals, nullptr);
      std::thread waiter([&] {
        int sig = 0;
        sigwait(&signals, &sig);
        server.stop();
      });
      std::cout << "serving " << svc::kServiceProtocol << " on " << listen.substr(0, colon) << ':' << server.port()
                << std::endl;
      server.run();
      if (waiter.joinable()) {
        pthread_kill(waiter.native_handle(), SIGTERM);
        waiter.join();
      }
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
