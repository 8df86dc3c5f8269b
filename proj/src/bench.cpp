#include "mapd/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "mapd/rng.hpp"

namespace mapd {

void BenchConfig::validate() const {
  if (agents < 1) throw std::invalid_argument("agents must be at least 1");
  if (seeds.empty()) throw std::invalid_argument("at least one seed is required");
  if (episodes < 1) throw std::invalid_argument("episodes must be at least 1");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1 step");
  if (budget.max_expansions < 1) throw std::invalid_argument("max expansions must be positive");
  if (!(budget.wall_time_limit > 0.0)) throw std::invalid_argument("replan timeout must be positive");
}

std::uint64_t episode_world_seed(std::uint64_t seed, int episode) {
  return mix_seed(seed, static_cast<std::uint64_t>(episode));
}

EpisodeMetrics first_delivery_metrics(const std::vector<std::optional<int>>& first_delivery, int horizon) {
  EpisodeMetrics m;
  for (const auto& f : first_delivery) {
    const std::int64_t v = f ? *f : horizon;
    if (!f) m.truncated = true;
    m.flowtime += v;
    m.makespan = std::max(m.makespan, v);
  }
  return m;
}

EpisodeMetrics run_episode(const WarehouseMap& map, const BenchConfig& config, std::uint64_t seed,
                           int episode, std::vector<TraceRecord>* trace) {
  config.validate();
  const auto world_seed = episode_world_seed(seed, episode);
  SolverConfig solver;
  solver.budget = config.budget;
  solver.seed = mix_seed(world_seed, 0xC85);

  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  WorldState world = init_episode(std::make_shared<const WarehouseMap>(map), config.agents, world_seed);
  TaskBoard board = TaskBoard::for_world(world);
  PlanCache cache;
  if (trace) {
    trace->clear();
    trace->push_back(make_trace_record(world, StepReport{}));
  }

  std::int64_t replans = 0;
  std::int64_t failures = 0;
  double replan_secs = 0.0;
  for (int t = 0; t < config.horizon; ++t) {
    const StepReport r = step_episode(world, board, cache, solver);
    if (r.replanned) ++replans;
    if (r.replan_failed) ++failures;
    replan_secs += r.replan_secs;
    if (trace) trace->push_back(make_trace_record(world, r));
  }
  const double wall = std::chrono::duration<double>(Clock::now() - t0).count();

  std::vector<std::optional<int>> first;
  double reward = 0.0;
  double delivered = 0.0;
  for (const auto& a : world.agents) {
    first.push_back(a.first_delivery_step);
    reward += a.cumulative_reward;
    delivered += a.deliveries;
  }
  EpisodeMetrics m = first_delivery_metrics(first, config.horizon);
  const double n = static_cast<double>(world.agents.size());
  m.mean_reward = reward / n;
  m.mean_delivered = delivered / n;
  m.wall_secs = wall;
  m.replans = replans;
  m.replan_failures = failures;
  m.replan_wall_secs = replan_secs;
  m.sim_steps = world.step;
  m.degraded = board.degraded;
  return m;
}

EpisodeMetrics run_episode(const BenchConfig& config, std::uint64_t seed, int episode,
                           std::vector<TraceRecord>* trace) {
  return run_episode(resolve_map(config.map), config, seed, episode, trace);
}

Stat mean_and_se(const std::vector<double>& values) {
  Stat s;
  if (values.empty()) return s;
  const double k = static_cast<double>(values.size());
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / k;
  if (values.size() < 2) return s;
  double ss = 0.0;
  for (double v : values) ss += (v - s.mean) * (v - s.mean);
  s.se = std::sqrt(ss / (k - 1.0)) / std::sqrt(k);
  return s;
}

std::vector<CellSummary> summarize(const std::vector<EpisodeRow>& rows) {
  std::vector<std::pair<std::string, int>> order;
  std::map<std::pair<std::string, int>, std::vector<const EpisodeRow*>> groups;
  for (const auto& r : rows) {
    const auto key = std::make_pair(r.map, r.agents);
    auto& g = groups[key];
    if (g.empty()) order.push_back(key);
    g.push_back(&r);
  }
  std::vector<CellSummary> out;
  for (const auto& key : order) {
    const auto& g = groups[key];
    auto stat = [&](auto field) {
      std::vector<double> v;
      for (const EpisodeRow* r : g) v.push_back(static_cast<double>(field(r->metrics)));
      return mean_and_se(v);
    };
    CellSummary c;
    c.map = key.first;
    c.agents = key.second;
    c.runs = static_cast<int>(g.size());
    c.flowtime = stat([](const EpisodeMetrics& m) { return m.flowtime; });
    c.makespan = stat([](const EpisodeMetrics& m) { return m.makespan; });
    c.mean_reward = stat([](const EpisodeMetrics& m) { return m.mean_reward; });
    c.mean_delivered = stat([](const EpisodeMetrics& m) { return m.mean_delivered; });
    c.wall_secs = stat([](const EpisodeMetrics& m) { return m.wall_secs; });
    c.replan_wall_secs = stat([](const EpisodeMetrics& m) { return m.replan_wall_secs; });
    c.replans = stat([](const EpisodeMetrics& m) { return m.replans; });
    c.replan_failures = stat([](const EpisodeMetrics& m) { return m.replan_failures; });
    for (const EpisodeRow* r : g) c.truncated_runs += r->metrics.truncated ? 1 : 0;
    out.push_back(c);
  }
  return out;
}

SuiteResults run_suite(const SuiteConfig& config) {
  struct Job {
    std::size_t map_index;
    int agents;
    std::uint64_t seed;
    int episode;
  };
  std::vector<WarehouseMap> maps;
  for (const auto& m : config.maps) maps.push_back(resolve_map(m));
  std::vector<Job> jobs;
  for (std::size_t mi = 0; mi < maps.size(); ++mi) {
    for (int n : config.agent_counts) {
      for (auto seed : config.seeds) {
        for (int e = 0; e < config.episodes; ++e) jobs.push_back({mi, n, seed, e});
      }
    }
  }

  auto bench_for = [&](const Job& j) {
    BenchConfig b;
    b.map = config.maps[j.map_index];
    b.agents = j.agents;
    b.seeds = config.seeds;
    b.episodes = config.episodes;
    b.horizon = config.horizon;
    b.budget = config.budget;
    b.validate();
    return b;
  };
  for (const auto& j : jobs) bench_for(j);

  SuiteResults results;
  results.rows.resize(jobs.size());
  auto run_job = [&](std::size_t i) {
    const Job& j = jobs[i];
    EpisodeRow row;
    row.map = config.maps[j.map_index];
    row.agents = j.agents;
    row.seed = j.seed;
    row.episode = j.episode;
    row.metrics = run_episode(maps[j.map_index], bench_for(j), j.seed, j.episode);
    results.rows[i] = std::move(row);
  };

  if (config.warmup && !jobs.empty()) {
    run_episode(maps[jobs.front().map_index], bench_for(jobs.front()), jobs.front().seed, jobs.front().episode);
  }

  unsigned threads = config.threads > 0 ? static_cast<unsigned>(config.threads) : std::thread::hardware_concurrency();
  if (!config.parallel || threads < 2) {
    for (std::size_t i = 0; i < jobs.size(); ++i) run_job(i);
  } else {
    results.timing_contended = true;
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < jobs.size(); i = next++) {
          try {
            run_job(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
          }
        }
      });
    }
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    for (auto& r : results.rows) r.metrics.contended = true;
  }
  results.cells = summarize(results.rows);
  return results;
}

namespace {

std::string format_double(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad number in CSV: '" + s + "'");
  }
  return v;
}

template <typename Int>
Int parse_int(const std::string& s) {
  Int v{};
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size()) {
    throw std::invalid_argument("bad integer in CSV: '" + s + "'");
  }
  return v;
}

}  // namespace

std::string to_csv(const std::vector<EpisodeRow>& rows) {
  std::string out = kCsvHeader;
  out += '\n';
  for (const auto& r : rows) {
    const auto& m = r.metrics;
    out += r.map + ',' + std::to_string(r.agents) + ',' + std::to_string(r.seed) + ',' +
           std::to_string(r.episode) + ',' + std::to_string(m.flowtime) + ',' + std::to_string(m.makespan) + ',' +
           format_double(m.mean_reward) + ',' + format_double(m.mean_delivered) + ',' +
           format_double(m.wall_secs) + ',' + std::to_string(m.replans) + ',' +
           std::to_string(m.replan_failures) + ',' + (m.truncated ? "1" : "0") + '\n';
  }
  return out;
}

std::vector<EpisodeRow> parse_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kCsvHeader) {
    throw std::invalid_argument("CSV header does not match the results schema");
  }
  std::vector<EpisodeRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string field;
    std::istringstream ls(line);
    while (std::getline(ls, field, ',')) f.push_back(field);
    if (f.size() != 12) throw std::invalid_argument("CSV row has " + std::to_string(f.size()) + " fields");
    EpisodeRow r;
    r.map = f[0];
    r.agents = parse_int<int>(f[1]);
    r.seed = parse_int<std::uint64_t>(f[2]);
    r.episode = parse_int<int>(f[3]);
    r.metrics.flowtime = parse_int<std::int64_t>(f[4]);
    r.metrics.makespan = parse_int<std::int64_t>(f[5]);
    r.metrics.mean_reward = parse_double(f[6]);
    r.metrics.mean_delivered = parse_double(f[7]);
    r.metrics.wall_secs = parse_double(f[8]);
    r.metrics.replans = parse_int<std::int64_t>(f[9]);
    r.metrics.replan_failures = parse_int<std::int64_t>(f[10]);
    r.metrics.truncated = parse_int<int>(f[11]) != 0;
    rows.push_back(std::move(r));
  }
  return rows;
}

std::string format_summary(const std::vector<CellSummary>& cells) {
  std::string out;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-10s %6s %5s %18s %16s %16s %16s %16s %10s\n", "map", "agents", "runs",
                "flowtime", "makespan", "reward/agent", "delivered/agent", "replan secs", "failures");
  out += buf;
  for (const auto& c : cells) {
    auto cell = [](const Stat& s) {
      char b[64];
      std::snprintf(b, sizeof b, "%.2f (%.2f)", s.mean, s.se);
      return std::string(b);
    };
    std::snprintf(buf, sizeof buf, "%-10s %6d %5d %18s %16s %16s %16s %16s %10.2f\n", c.map.c_str(), c.agents,
                  c.runs, cell(c.flowtime).c_str(), cell(c.makespan).c_str(), cell(c.mean_reward).c_str(),
                  cell(c.mean_delivered).c_str(), cell(c.replan_wall_secs).c_str(), c.replan_failures.mean);
    out += buf;
  }
  return out;
}

namespace {

char agent_glyph(int id) {
  static constexpr std::string_view glyphs =
      "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ";
  return glyphs[static_cast<std::size_t>(id) % glyphs.size()];
}

}  // namespace

std::string render_ascii(const WarehouseMap& map, const TraceRecord& record) {
  std::vector<std::string> rows(static_cast<std::size_t>(map.height()));
  for (int y = 0; y < map.height(); ++y) {
    auto& row = rows[static_cast<std::size_t>(y)];
    for (int x = 0; x < map.width(); ++x) {
      switch (map.kind({x, y})) {
        case CellKind::Corridor: row += '.'; break;
        case CellKind::Shelf: row += 'S'; break;
        case CellKind::Delivery: row += 'D'; break;
      }
    }
  }
  auto put = [&](Cell c, char g) {
    if (!map.in_bounds(c)) throw std::out_of_range("trace cell " + to_string(c) + " is outside the map");
    rows[static_cast<std::size_t>(c.y)][static_cast<std::size_t>(c.x)] = g;
  };
  for (const auto& it : record.items) put(it.shelf, '*');
  for (const auto& a : record.agents) put(a.pos, agent_glyph(a.id));
  std::string out;
  for (const auto& r : rows) out += r + '\n';
  return out;
}

std::string render_ascii(const WarehouseMap& map, const std::vector<TraceRecord>& trace, int step) {
  for (const auto& r : trace) {
    if (r.step == step) return render_ascii(map, r);
  }
  throw std::out_of_range("trace has no record for step " + std::to_string(step));
}

}  // namespace mapd
