#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mapd/bench.hpp"
#include "mapd/cbs.hpp"
#include "mapd/scenario.hpp"

namespace {

struct SolverFlags {
  std::int64_t max_expansions = mapd::Budget{}.max_expansions;
  double timeout = mapd::Budget{}.wall_time_limit;

  void add(CLI::App* app) {
    app->add_option("--max-expansions", max_expansions, "CBS constraint-tree expansion budget per solve")
        ->capture_default_str();
    app->add_option("--replan-timeout-secs", timeout, "wall-clock limit per CBS solve")->capture_default_str();
  }
  mapd::Budget budget() const {
    mapd::Budget b;
    b.max_expansions = max_expansions;
    b.wall_time_limit = timeout;
    return b;
  }
};

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

int run_bench(const std::vector<std::string>& maps, const std::vector<int>& agents,
              const std::vector<std::uint64_t>& seeds, int episodes, int steps, const SolverFlags& solver,
              const std::string& out, bool parallel, int threads) {
  mapd::SuiteConfig cfg;
  cfg.maps = maps;
  cfg.agent_counts = agents;
  cfg.seeds = seeds;
  cfg.episodes = episodes;
  cfg.horizon = steps;
  cfg.budget = solver.budget();
  cfg.parallel = parallel;
  cfg.threads = threads;
  const auto results = mapd::run_suite(cfg);
  const auto csv = mapd::to_csv(results.rows);
  if (out.empty()) {
    std::cout << csv;
  } else {
    write_file(out, csv);
  }
  std::cerr << mapd::format_summary(results.cells);
  if (results.timing_contended) std::cerr << "note: episodes ran in parallel; timing columns are contended\n";
  return 0;
}

int run_single_episode(const std::string& map_name, int agents, std::uint64_t seed, int episode, int steps,
                       const SolverFlags& solver, const std::string& trace_path, bool render) {
  mapd::BenchConfig cfg;
  cfg.map = map_name;
  cfg.agents = agents;
  cfg.horizon = steps;
  cfg.budget = solver.budget();
  const auto map = mapd::resolve_map(map_name);
  std::vector<mapd::TraceRecord> trace;
  const bool want_trace = !trace_path.empty() || render;
  const auto m = mapd::run_episode(map, cfg, seed, episode, want_trace ? &trace : nullptr);

  if (!trace_path.empty()) {
    std::ofstream out(trace_path);
    if (!out) throw std::runtime_error("cannot write " + trace_path);
    for (const auto& r : trace) out << mapd::to_json_line(r) << '\n';
  }
  if (render) {
    for (const auto& r : trace) std::cout << "step " << r.step << "\n" << mapd::render_ascii(map, r) << "\n";
  }
  mapd::EpisodeRow row{map_name, agents, seed, episode, m};
  std::cout << mapd::to_csv({row});
  if (m.truncated) std::cerr << "note: some agents never delivered; they count the full horizon\n";
  if (m.degraded) std::cerr << "note: episode degraded after repeated replanning failures\n";
  return 0;
}

int run_solve(const std::string& map_name, const std::string& scenario, std::uint64_t seed,
              const SolverFlags& solver) {
  const auto map = mapd::resolve_map(map_name);
  const auto agents = mapd::load_scenario_file(scenario);
  const auto instance = mapd::scenario_instance(map, agents);
  const auto result = mapd::cbs_solve(instance, seed, solver.budget());
  std::cout << "status " << mapd::to_string(result.status) << "\n"
            << "sum_of_costs " << result.cost << "\n"
            << "expansions " << result.expansions << "\n"
            << "seconds " << result.seconds << "\n";
  for (std::size_t i = 0; i < result.paths.size(); ++i) {
    std::cout << "agent " << agents[i].label << ":";
    for (auto c : result.paths[i].vertices) std::cout << " " << c.x << "," << c.y;
    std::cout << "\n";
  }
  return result.status == mapd::CbsStatus::Solved ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lifelong multi-agent pickup-and-delivery benchmark with conflict-based search"};
  app.require_subcommand(1);

  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  int episodes = 4;
  int steps = 500;
  SolverFlags solver;

  auto* bench = app.add_subcommand("bench", "run the map x agent-count matrix and write per-episode CSV");
  std::vector<std::string> bench_maps{"small", "medium", "large"};
  std::vector<int> bench_agents{2, 5, 8};
  std::string out;
  bool parallel = false;
  int threads = 0;
  bench->add_option("--map", bench_maps, "small|medium|large|PATH (repeatable or comma separated)")
      ->delimiter(',')
      ->capture_default_str();
  bench->add_option("--agents", bench_agents, "agent counts")->delimiter(',')->capture_default_str();
  bench->add_option("--seeds", seeds, "seeds")->delimiter(',')->capture_default_str();
  bench->add_option("--episodes", episodes, "episodes per seed")->capture_default_str();
  bench->add_option("--steps", steps, "steps per episode")->capture_default_str();
  bench->add_option("--out", out, "CSV output path (stdout if omitted)");
  bench->add_flag("--parallel", parallel, "run episodes on worker threads (timing becomes contended)");
  bench->add_option("--threads", threads, "worker threads for --parallel (0: all cores)");
  solver.add(bench);

  auto* episode = app.add_subcommand("episode", "run one episode");
  std::string map_name = "small";
  int agents = 2;
  int episode_index = 0;
  std::string trace;
  bool render = false;
  episode->add_option("--map", map_name, "small|medium|large|PATH")->capture_default_str();
  episode->add_option("--agents", agents, "number of agents")->capture_default_str();
  episode->add_option("--seeds", seeds, "seed (first value is used)")->delimiter(',');
  episode->add_option("--episode", episode_index, "episode index")->capture_default_str();
  episode->add_option("--steps", steps, "steps")->capture_default_str();
  episode->add_option("--trace", trace, "write a JSONL trace");
  episode->add_flag("--render", render, "print an ASCII frame per step");
  solver.add(episode);

  auto* solve = app.add_subcommand("solve", "solve a single-shot instance with CBS");
  std::string solve_map;
  std::string scenario;
  std::uint64_t solve_seed = 0;
  solve->add_option("--map", solve_map, "small|medium|large|PATH")->required();
  solve->add_option("--scenario", scenario, "lines '<agent> <sx> <sy> <gx> <gy>'")->required();
  solve->add_option("--seed", solve_seed, "conflict-choice seed")->capture_default_str();
  solver.add(solve);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*bench) return run_bench(bench_maps, bench_agents, seeds, episodes, steps, solver, out, parallel, threads);
    if (*episode) {
      return run_single_episode(map_name, agents, seeds.empty() ? 0 : seeds.front(), episode_index, steps, solver,
                                trace, render);
    }
    if (*solve) return run_solve(solve_map, scenario, solve_seed, solver);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
