#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "mapd/bench.hpp"

using namespace mapd;

namespace {

bool same_outcome(const EpisodeMetrics& a, const EpisodeMetrics& b) {
  return a.flowtime == b.flowtime && a.makespan == b.makespan && a.mean_reward == b.mean_reward &&
         a.mean_delivered == b.mean_delivered && a.replans == b.replans &&
         a.replan_failures == b.replan_failures && a.truncated == b.truncated;
}

bool same_row(const EpisodeRow& a, const EpisodeRow& b) {
  return a.map == b.map && a.agents == b.agents && a.seed == b.seed && a.episode == b.episode &&
         same_outcome(a.metrics, b.metrics);
}

BenchConfig config_for(int agents, int horizon) {
  BenchConfig c;
  c.agents = agents;
  c.horizon = horizon;
  return c;
}

}  // namespace

TEST_CASE("flowtime and makespan from first deliveries") {
  const auto m = first_delivery_metrics({10, 14}, 500);
  CHECK(m.flowtime == 24);
  CHECK(m.makespan == 14);
  CHECK_FALSE(m.truncated);

  const auto idle = first_delivery_metrics({std::nullopt, 7, std::nullopt}, 500);
  CHECK(idle.flowtime == 1007);
  CHECK(idle.makespan == 500);
  CHECK(idle.truncated);
}

TEST_CASE("single agent shuttling next to the delivery row") {
  // The only corridor cell is (1,0) and the only shelf is (0,0), so the agent
  // picks up at odd steps and delivers at even steps from step 2 on.
  const auto map = load_map("S.\nDD");
  std::vector<TraceRecord> trace;
  const auto m = run_episode(map, config_for(1, 500), 0, 0, &trace);
  CHECK(m.flowtime == 2);
  CHECK(m.makespan == 2);
  CHECK(m.mean_delivered == 250.0);
  CHECK(m.mean_reward == 750.0);
  CHECK(m.replans == 500);
  CHECK(m.replan_failures == 0);
  CHECK_FALSE(m.truncated);
  CHECK(m.sim_steps == 500);
  REQUIRE(trace.size() == 501);
  CHECK(trace[0].step == 0);
  CHECK(trace[0].agents[0].pos == Cell{1, 0});
  CHECK(trace[1].agents[0].pos == Cell{0, 0});
  CHECK(trace[2].agents[0].pos == Cell{0, 1});
  CHECK(trace[2].events.size() == 2);
}

TEST_CASE("agents that can never deliver count the horizon") {
  // One corridor cell boxed in by shelves; only the two neighbouring shelves
  // can be reached, and only one of them leads to the delivery row.
  std::vector<CellKind> cells;
  const std::string rows = ".SSSSSSSSSSSDDDDDD";
  for (char c : rows) cells.push_back(c == 'S' ? CellKind::Shelf : c == 'D' ? CellKind::Delivery : CellKind::Corridor);
  const WarehouseMap map(6, 3, cells, "boxed");
  std::uint64_t seed = 0;
  for (;; ++seed) {
    const auto w = init_episode(map, 1, episode_world_seed(seed, 0));
    const Cell shelf = w.queue.items[0].shelf;
    if (shelf != Cell{1, 0} && shelf != Cell{0, 1}) break;
  }
  const auto m = run_episode(map, config_for(1, 500), seed, 0);
  CHECK(m.flowtime == 500);
  CHECK(m.makespan == 500);
  CHECK(m.truncated);
  CHECK(m.mean_delivered == 0.0);
  CHECK(m.mean_reward == 0.0);
  CHECK(m.replan_failures == 500);
  CHECK(m.degraded);
}

TEST_CASE("episode metrics are consistent with the trace") {
  for (int n : {2, 5}) {
    std::vector<TraceRecord> trace;
    const auto cfg = config_for(n, 300);
    const auto m = run_episode(builtin_map("small"), cfg, 4, 1, &trace);
    CHECK(m.makespan <= m.flowtime);
    CHECK(m.flowtime <= static_cast<std::int64_t>(n) * cfg.horizon);
    int pickups = 0;
    int deliveries = 0;
    int replans = 0;
    for (const auto& r : trace) {
      replans += r.replanned;
      for (const auto& e : r.events) {
        pickups += e.kind == EventKind::Pickup;
        deliveries += e.kind == EventKind::Delivery;
      }
    }
    CHECK(m.mean_delivered == doctest::Approx(static_cast<double>(deliveries) / n));
    CHECK(m.mean_reward == doctest::Approx((pickups + 2.0 * deliveries) / n));
    CHECK(m.replans == replans);
  }
}

TEST_CASE("identical configurations reproduce every non-timing field") {
  const auto cfg = config_for(5, 200);
  const auto a = run_episode(builtin_map("medium"), cfg, 3, 2);
  const auto b = run_episode(builtin_map("medium"), cfg, 3, 2);
  CHECK(same_outcome(a, b));
  const auto c = run_episode(builtin_map("medium"), cfg, 3, 3);
  CHECK_FALSE(same_outcome(a, c));
}

TEST_CASE("invalid configurations") {
  auto cfg = config_for(2, 500);
  cfg.horizon = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = config_for(0, 500);
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = config_for(2, 500);
  cfg.seeds.clear();
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = config_for(2, 500);
  cfg.budget.wall_time_limit = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("mean and standard error") {
  const auto one = mean_and_se({42.0});
  CHECK(one.mean == 42.0);
  CHECK(one.se == 0.0);
  const auto two = mean_and_se({10.0, 14.0});
  CHECK(two.mean == 12.0);
  CHECK(two.se == doctest::Approx(2.0));
  const auto four = mean_and_se({1.0, 2.0, 3.0, 4.0});
  CHECK(four.mean == 2.5);
  CHECK(four.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0));
}

TEST_CASE("summaries group rows by map and agent count") {
  std::vector<EpisodeRow> rows;
  for (int i = 0; i < 4; ++i) {
    EpisodeRow r{"small", i < 2 ? 2 : 5, static_cast<std::uint64_t>(i), 0, {}};
    r.metrics.flowtime = 10 + 4 * (i % 2);
    r.metrics.truncated = i == 3;
    rows.push_back(r);
  }
  const auto cells = summarize(rows);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].agents == 2);
  CHECK(cells[0].runs == 2);
  CHECK(cells[0].flowtime.mean == 12.0);
  CHECK(cells[0].flowtime.se == doctest::Approx(2.0));
  CHECK(cells[1].truncated_runs == 1);
  CHECK(format_summary(cells).find("small") != std::string::npos);
}

TEST_CASE("csv header and round trip") {
  CHECK(std::string(kCsvHeader) ==
        "map,agents,seed,episode,flowtime,makespan,mean_reward,mean_delivered,wall_secs,replans,replan_failures,"
        "truncated");
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 100.0);
  std::vector<EpisodeRow> rows;
  for (int i = 0; i < 50; ++i) {
    EpisodeRow r{i % 2 ? "medium" : "small", 1 + i % 8, rng(), i % 4, {}};
    r.metrics.flowtime = static_cast<std::int64_t>(rng() % 4000);
    r.metrics.makespan = static_cast<std::int64_t>(rng() % 500);
    r.metrics.mean_reward = u(rng);
    r.metrics.mean_delivered = i == 0 ? 1.0 / 3.0 : u(rng);
    r.metrics.wall_secs = u(rng) / 7.0;
    r.metrics.replans = i;
    r.metrics.replan_failures = i % 3;
    r.metrics.truncated = i % 5 == 0;
    rows.push_back(r);
  }
  const auto csv = to_csv(rows);
  CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  const auto back = parse_csv(csv);
  REQUIRE(back.size() == rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(same_row(back[i], rows[i]));
    CHECK(back[i].metrics.wall_secs == rows[i].metrics.wall_secs);
  }
  CHECK(to_csv(back) == csv);
  CHECK_THROWS_AS(parse_csv("map,agents\nsmall,2\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse_csv(std::string(kCsvHeader) + "\nsmall,2,0\n"), std::invalid_argument);
}

TEST_CASE("ascii frames") {
  const auto map = load_map(".S\nDD");
  CHECK(render_ascii(map, TraceRecord{}) == ".S\nDD\n");

  TraceRecord r;
  r.items.push_back({0, {1, 0}});
  r.agents.push_back({0, {0, 1}, Phase::Carrying, 0});
  CHECK(render_ascii(map, r) == ".*\n0D\n");
  r.agents.push_back({11, {1, 0}, Phase::Seeking, std::nullopt});
  CHECK(render_ascii(map, r) == ".b\n0D\n");

  r.agents.push_back({2, {5, 5}, Phase::Seeking, std::nullopt});
  CHECK_THROWS_AS(render_ascii(map, r), std::out_of_range);
  CHECK_THROWS_AS(render_ascii(map, std::vector<TraceRecord>{}, 0), std::out_of_range);
}

TEST_CASE("frames of real episodes match the map size") {
  for (const char* name : {"small", "medium", "large"}) {
    const auto map = builtin_map(name);
    std::vector<TraceRecord> trace;
    run_episode(map, config_for(3, 20), 0, 0, &trace);
    const auto frame = render_ascii(map, trace, 10);
    std::istringstream in(frame);
    std::string line;
    int lines = 0;
    while (std::getline(in, line)) {
      CHECK(static_cast<int>(line.size()) == map.width());
      ++lines;
    }
    CHECK(lines == map.height());
  }
}

TEST_CASE("suite runs sequentially and in parallel with the same outcomes") {
  SuiteConfig cfg;
  cfg.maps = {"small"};
  cfg.agent_counts = {1, 3};
  cfg.seeds = {0, 1};
  cfg.episodes = 2;
  cfg.horizon = 60;
  const auto seq = run_suite(cfg);
  REQUIRE(seq.rows.size() == 8);
  CHECK_FALSE(seq.timing_contended);
  CHECK(seq.cells.size() == 2);
  cfg.parallel = true;
  cfg.threads = 2;
  const auto par = run_suite(cfg);
  CHECK(par.timing_contended);
  REQUIRE(par.rows.size() == seq.rows.size());
  for (std::size_t i = 0; i < seq.rows.size(); ++i) CHECK(same_row(seq.rows[i], par.rows[i]));

  SuiteConfig single = cfg;
  single.parallel = false;
  single.agent_counts = {2};
  single.seeds = {5};
  single.episodes = 1;
  const auto one = run_suite(single);
  REQUIRE(one.cells.size() == 1);
  CHECK(one.cells[0].flowtime.mean == static_cast<double>(one.rows[0].metrics.flowtime));
  CHECK(one.cells[0].flowtime.se == 0.0);
}
