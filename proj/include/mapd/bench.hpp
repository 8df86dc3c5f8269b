#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "mapd/cbs.hpp"
#include "mapd/lifelong.hpp"

namespace mapd {

struct EpisodeMetrics {
  // First-delivery step summed / maximised over agents. Agents that never
  // deliver contribute the horizon and set `truncated`.
  std::int64_t flowtime = 0;
  std::int64_t makespan = 0;
  double mean_reward = 0.0;
  double mean_delivered = 0.0;
  double wall_secs = 0.0;
  std::int64_t replans = 0;
  std::int64_t replan_failures = 0;
  bool truncated = false;

  // Not part of the CSV.
  double replan_wall_secs = 0.0;
  int sim_steps = 0;
  bool degraded = false;
  bool contended = false;
};

struct BenchConfig {
  std::string map = "small";  // builtin name or path
  int agents = 2;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  int episodes = 4;
  int horizon = 500;
  Budget budget;

  void validate() const;
};

// World and solver seeds for one (seed, episode) pair.
std::uint64_t episode_world_seed(std::uint64_t seed, int episode);

// Drives step_episode for exactly config.horizon steps. When `trace` is given
// it receives the initial state (step 0) followed by one record per step.
EpisodeMetrics run_episode(const BenchConfig& config, std::uint64_t seed, int episode,
                           std::vector<TraceRecord>* trace = nullptr);

// Same, on an already-loaded map.
EpisodeMetrics run_episode(const WarehouseMap& map, const BenchConfig& config, std::uint64_t seed,
                           int episode, std::vector<TraceRecord>* trace = nullptr);

// Flowtime/makespan convention applied to per-agent first-delivery steps.
EpisodeMetrics first_delivery_metrics(const std::vector<std::optional<int>>& first_delivery, int horizon);

struct EpisodeRow {
  std::string map;
  int agents = 0;
  std::uint64_t seed = 0;
  int episode = 0;
  EpisodeMetrics metrics;
};

struct Stat {
  double mean = 0.0;
  double se = 0.0;  // sample standard deviation / sqrt(k); 0 for k = 1
};

Stat mean_and_se(const std::vector<double>& values);

struct CellSummary {
  std::string map;
  int agents = 0;
  int runs = 0;
  Stat flowtime;
  Stat makespan;
  Stat mean_reward;
  Stat mean_delivered;
  Stat wall_secs;
  Stat replan_wall_secs;
  Stat replans;
  Stat replan_failures;
  int truncated_runs = 0;
};

struct SuiteConfig {
  std::vector<std::string> maps{"small", "medium", "large"};
  std::vector<int> agent_counts{2, 5, 8};
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  int episodes = 4;
  int horizon = 500;
  Budget budget;
  bool parallel = false;
  int threads = 0;      // 0: hardware concurrency
  bool warmup = true;   // run one untimed episode before measuring
};

struct SuiteResults {
  std::vector<EpisodeRow> rows;  // map, agents, seed, episode order
  std::vector<CellSummary> cells;
  bool timing_contended = false;
};

SuiteResults run_suite(const SuiteConfig& config);

// Per-cell aggregation of rows, in first-appearance order of (map, agents).
std::vector<CellSummary> summarize(const std::vector<EpisodeRow>& rows);

inline constexpr const char* kCsvHeader =
    "map,agents,seed,episode,flowtime,makespan,mean_reward,mean_delivered,wall_secs,replans,"
    "replan_failures,truncated";

std::string to_csv(const std::vector<EpisodeRow>& rows);
std::vector<EpisodeRow> parse_csv(const std::string& text);

// Human-readable table of cell means with standard errors in parentheses.
std::string format_summary(const std::vector<CellSummary>& cells);

// One character per cell: agent glyph (0-9, then a-z, A-Z), '*' requested
// shelf, 'S' shelf, 'D' delivery, '.' corridor. Agents take precedence.
std::string render_ascii(const WarehouseMap& map, const TraceRecord& record);
std::string render_ascii(const WarehouseMap& map, const std::vector<TraceRecord>& trace, int step);

}  // namespace mapd
