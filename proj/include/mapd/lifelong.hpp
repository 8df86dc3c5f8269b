#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "mapd/cbs.hpp"
#include "mapd/mapf.hpp"
#include "mapd/warehouse.hpp"

namespace mapd {

enum class GoalKind : std::uint8_t { PickupItem, DeliverTo };

struct Assignment {
  int agent = 0;
  GoalKind kind = GoalKind::PickupItem;
  ItemId item = -1;  // PickupItem only
  Cell goal;

  bool operator==(const Assignment&) const = default;
};

// Paths with absolute start step `valid_from`, mutually conflict-free from then on.
struct PlanCache {
  std::vector<Path> paths;
  int valid_from = 0;

  bool empty() const { return paths.empty(); }
};

// Per-episode bookkeeping of the orchestrator.
struct TaskBoard {
  std::vector<std::optional<Assignment>> assignments;
  bool replan_pending = true;
  int consecutive_failures = 0;
  int failed_attempts = 0;  // total, used to vary the conflict-choice seed
  bool degraded = false;

  static TaskBoard for_world(const WorldState& world);
};

struct SolverConfig {
  Budget budget;
  std::uint64_t seed = 0;
  int degraded_after = 10;  // consecutive failed replans
};

struct StepReport {
  int step = 0;  // step index the moves were executed at
  bool replanned = false;
  bool replan_failed = false;
  std::optional<CbsStatus> status;
  double replan_secs = 0.0;
  std::int64_t expansions = 0;
  int reassigned = 0;
  bool degraded = false;
  std::vector<Move> moves;
  std::vector<Event> events;
};

// Graph an agent plans on: corridor and delivery cells, plus the shelf of its
// assigned item (only for that agent), plus its own cell. A shelf the agent is
// standing on but not targeting can be left but not re-entered. Every other
// shelf is an obstacle.
PlanningGraph agent_view(const WorldState& world, int agent_id, const std::optional<Assignment>& assignment);

// Nearest requested item not in `taken`, by shortest-path distance on the
// agent's seeking view; ties go to the lower item id.
Assignment assign_pickup(const WorldState& world, int agent_id, const std::set<ItemId>& taken);

// Nearest delivery cell not in `reserved` on the carrying view; ties go to the
// lower column.
Assignment assign_delivery(const WorldState& world, int agent_id, const std::set<Cell>& reserved);

MAPFInstance build_instance(const WorldState& world, const TaskBoard& board);

// One orchestration step: refresh consumed assignments, replan the whole team
// with CBS if any changed (or a previous replan failed), execute one move per
// agent from the plan cache, and apply it to the world. A failed replan makes
// every agent wait this step.
StepReport step_episode(WorldState& world, TaskBoard& board, PlanCache& cache, const SolverConfig& config);

// Line-delimited trace records.
struct TraceAgent {
  int id = 0;
  Cell pos;
  Phase phase = Phase::Seeking;
  std::optional<ItemId> item;

  bool operator==(const TraceAgent&) const = default;
};

struct TraceRecord {
  int step = 0;  // time after the step's moves were applied
  std::vector<TraceAgent> agents;
  std::vector<RequestedItem> items;
  std::vector<Event> events;
  bool replanned = false;
  bool replan_failed = false;
  double replan_secs = 0.0;
  std::int64_t expansions = 0;

  bool operator==(const TraceRecord&) const = default;
};

TraceRecord make_trace_record(const WorldState& world, const StepReport& report);
std::string to_json_line(const TraceRecord& record);
TraceRecord parse_trace_line(const std::string& line);

}  // namespace mapd
