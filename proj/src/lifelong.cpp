#include "mapd/lifelong.hpp"

#include <algorithm>
#include <chrono>
#include <climits>
#include <queue>
#include <stdexcept>

#include <json.hpp>

#include "mapd/rng.hpp"

namespace mapd {

namespace {

constexpr int kFar = INT_MAX;

PlanningGraph base_view(const WorldState& world, int agent_id, std::optional<Cell> target_shelf) {
  const WarehouseMap& map = *world.map;
  const auto n = static_cast<std::size_t>(map.area());
  std::vector<std::uint8_t> passable(n, 0);
  std::vector<std::uint8_t> no_entry(n, 0);
  for (int i = 0; i < map.area(); ++i) {
    if (map.is_open(map.cell(i))) passable[static_cast<std::size_t>(i)] = 1;
  }
  if (target_shelf) passable[static_cast<std::size_t>(map.index(*target_shelf))] = 1;
  const Cell here = world.agent(agent_id).pos;
  const auto h = static_cast<std::size_t>(map.index(here));
  if (!passable[h]) {
    passable[h] = 1;
    no_entry[h] = 1;
  }
  return PlanningGraph(map.width(), map.height(), std::move(passable), std::move(no_entry));
}

// Forward BFS distances from `source`.
std::vector<int> distances_from(const PlanningGraph& graph, Cell source) {
  std::vector<int> dist(static_cast<std::size_t>(graph.size()), kFar);
  std::queue<Cell> q;
  dist[static_cast<std::size_t>(graph.index(source))] = 0;
  q.push(source);
  while (!q.empty()) {
    const Cell u = q.front();
    q.pop();
    const int du = dist[static_cast<std::size_t>(graph.index(u))];
    for (Cell v : graph.successors(u)) {
      auto& dv = dist[static_cast<std::size_t>(graph.index(v))];
      if (dv == kFar) {
        dv = du + 1;
        q.push(v);
      }
    }
  }
  return dist;
}

bool goal_consumed(const WorldState& world, const Assignment& a) {
  const AgentState& s = world.agent(a.agent);
  if (a.kind == GoalKind::PickupItem) return s.phase == Phase::Carrying || world.queue.find(a.item) == nullptr;
  return s.phase == Phase::Seeking;
}

}  // namespace

TaskBoard TaskBoard::for_world(const WorldState& world) {
  const auto deliveries = world.map->cells_of(CellKind::Delivery).size();
  if (world.agents.size() > deliveries) {
    throw std::invalid_argument("more agents (" + std::to_string(world.agents.size()) +
                                ") than delivery cells (" + std::to_string(deliveries) + ")");
  }
  TaskBoard board;
  board.assignments.resize(world.agents.size());
  return board;
}

PlanningGraph agent_view(const WorldState& world, int agent_id, const std::optional<Assignment>& assignment) {
  std::optional<Cell> shelf;
  if (assignment && assignment->kind == GoalKind::PickupItem) shelf = assignment->goal;
  return base_view(world, agent_id, shelf);
}

Assignment assign_pickup(const WorldState& world, int agent_id, const std::set<ItemId>& taken) {
  const AgentState& agent = world.agent(agent_id);
  if (agent.phase != Phase::Seeking) {
    throw std::logic_error("assign_pickup: agent " + std::to_string(agent_id) + " is carrying");
  }
  const PlanningGraph view = base_view(world, agent_id, std::nullopt);
  const auto dist = distances_from(view, agent.pos);
  const WarehouseMap& map = *world.map;

  std::optional<RequestedItem> best;
  int best_d = kFar;
  for (const auto& item : world.queue.items) {
    if (taken.contains(item.id)) continue;
    int d = kFar;
    if (item.shelf == agent.pos) {
      d = 0;
    } else {
      for (Move m : {Move::Up, Move::Down, Move::Left, Move::Right}) {
        const Cell n = apply_move(item.shelf, m);
        if (!map.in_bounds(n) || !view.contains(n)) continue;
        const int dn = dist[static_cast<std::size_t>(view.index(n))];
        if (dn != kFar) d = std::min(d, dn + 1);
      }
    }
    if (!best || d < best_d || (d == best_d && item.id < best->id)) {
      best = item;
      best_d = d;
    }
  }
  if (!best) throw std::logic_error("assign_pickup: no requested item available");
  return {agent_id, GoalKind::PickupItem, best->id, best->shelf};
}

Assignment assign_delivery(const WorldState& world, int agent_id, const std::set<Cell>& reserved) {
  const AgentState& agent = world.agent(agent_id);
  if (agent.phase != Phase::Carrying) {
    throw std::logic_error("assign_delivery: agent " + std::to_string(agent_id) + " is not carrying");
  }
  const PlanningGraph view = base_view(world, agent_id, std::nullopt);
  const auto dist = distances_from(view, agent.pos);

  std::optional<Cell> best;
  int best_d = kFar;
  for (Cell c : world.map->cells_of(CellKind::Delivery)) {
    if (reserved.contains(c)) continue;
    const int d = dist[static_cast<std::size_t>(view.index(c))];
    if (!best || d < best_d || (d == best_d && c.x < best->x)) {
      best = c;
      best_d = d;
    }
  }
  if (!best) throw std::logic_error("assign_delivery: every delivery cell is reserved");
  return {agent_id, GoalKind::DeliverTo, -1, *best};
}

MAPFInstance build_instance(const WorldState& world, const TaskBoard& board) {
  MAPFInstance inst;
  for (const auto& agent : world.agents) {
    const auto& a = board.assignments[static_cast<std::size_t>(agent.id)];
    if (!a) throw std::logic_error("build_instance: agent " + std::to_string(agent.id) + " has no goal");
    inst.graphs.push_back(agent_view(world, agent.id, a));
    inst.starts.push_back(agent.pos);
    inst.goals.push_back(a->goal);
  }
  return inst;
}

StepReport step_episode(WorldState& world, TaskBoard& board, PlanCache& cache, const SolverConfig& config) {
  StepReport report;
  report.step = world.step;
  const int n = static_cast<int>(world.agents.size());
  if (static_cast<int>(board.assignments.size()) != n) {
    throw std::invalid_argument("step_episode: task board does not match the world");
  }

  // (1) re-task agents whose goal was consumed
  for (auto& a : board.assignments) {
    if (a && goal_consumed(world, *a)) a.reset();
  }
  for (int i = 0; i < n; ++i) {
    auto& slot = board.assignments[static_cast<std::size_t>(i)];
    if (slot) continue;
    const AgentState& agent = world.agent(i);
    if (agent.phase == Phase::Seeking) {
      std::set<ItemId> taken;
      for (const auto& other : world.agents) {
        if (other.phase == Phase::Carrying && other.item) taken.insert(*other.item);
      }
      for (const auto& b : board.assignments) {
        if (b && b->kind == GoalKind::PickupItem) taken.insert(b->item);
      }
      slot = assign_pickup(world, i, taken);
      set_target_item(world, i, slot->item);
    } else {
      std::set<Cell> reserved;
      for (const auto& b : board.assignments) {
        if (b && b->kind == GoalKind::DeliverTo) reserved.insert(b->goal);
      }
      slot = assign_delivery(world, i, reserved);
    }
    ++report.reassigned;
  }
  if (report.reassigned > 0) board.replan_pending = true;

  // (2) full-team replan
  if (board.replan_pending) {
    report.replanned = true;
    const auto t0 = std::chrono::steady_clock::now();
    const auto seed = mix_seed(mix_seed(config.seed, static_cast<std::uint64_t>(world.step)),
                               static_cast<std::uint64_t>(board.failed_attempts));
    const CbsResult result = cbs_solve(build_instance(world, board), seed, config.budget);
    report.replan_secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    report.status = result.status;
    report.expansions = result.expansions;
    if (result.status == CbsStatus::Solved) {
      cache.paths = result.paths;
      for (auto& p : cache.paths) p.start_step = world.step;
      cache.valid_from = world.step;
      board.replan_pending = false;
      board.consecutive_failures = 0;
    } else {
      cache = PlanCache{};
      report.replan_failed = true;
      ++board.failed_attempts;
      if (++board.consecutive_failures >= config.degraded_after) board.degraded = true;
    }
  }
  report.degraded = board.degraded;

  // (3) one move per agent from the cache
  report.moves.assign(static_cast<std::size_t>(n), Move::Wait);
  if (!board.replan_pending && !cache.empty()) {
    const int tau = world.step - cache.valid_from;
    for (int i = 0; i < n; ++i) {
      const Path& p = cache.paths[static_cast<std::size_t>(i)];
      if (p.at(tau) != world.agent(i).pos) {
        throw std::logic_error("plan cache out of sync for agent " + std::to_string(i));
      }
      report.moves[static_cast<std::size_t>(i)] = move_between(p.at(tau), p.at(tau + 1));
    }
  }

  // (4) execute
  report.events = apply_joint_moves_inplace(world, report.moves);
  return report;
}

TraceRecord make_trace_record(const WorldState& world, const StepReport& report) {
  TraceRecord r;
  r.step = world.step;
  for (const auto& a : world.agents) r.agents.push_back({a.id, a.pos, a.phase, a.item});
  r.items = world.queue.items;
  r.events = report.events;
  r.replanned = report.replanned;
  r.replan_failed = report.replan_failed;
  r.replan_secs = report.replan_secs;
  r.expansions = report.expansions;
  return r;
}

std::string to_json_line(const TraceRecord& record) {
  using nlohmann::json;
  json j;
  j["step"] = record.step;
  j["agents"] = json::array();
  for (const auto& a : record.agents) {
    json ja{{"id", a.id}, {"x", a.pos.x}, {"y", a.pos.y},
            {"phase", a.phase == Phase::Seeking ? "seeking" : "carrying"}};
    ja["item"] = a.item ? json(*a.item) : json(nullptr);
    j["agents"].push_back(std::move(ja));
  }
  j["items"] = json::array();
  for (const auto& it : record.items) j["items"].push_back({{"id", it.id}, {"x", it.shelf.x}, {"y", it.shelf.y}});
  j["events"] = json::array();
  for (const auto& e : record.events) {
    j["events"].push_back({{"kind", to_string(e.kind)},
                           {"agent", e.agent},
                           {"item", e.item},
                           {"x", e.cell.x},
                           {"y", e.cell.y},
                           {"reward", e.reward}});
  }
  j["replanned"] = record.replanned;
  j["replan_failed"] = record.replan_failed;
  j["replan_secs"] = record.replan_secs;
  j["expansions"] = record.expansions;
  return j.dump();
}

TraceRecord parse_trace_line(const std::string& line) {
  const auto j = nlohmann::json::parse(line);
  TraceRecord r;
  r.step = j.at("step").get<int>();
  for (const auto& ja : j.at("agents")) {
    TraceAgent a;
    a.id = ja.at("id").get<int>();
    a.pos = {ja.at("x").get<int>(), ja.at("y").get<int>()};
    a.phase = ja.at("phase").get<std::string>() == "carrying" ? Phase::Carrying : Phase::Seeking;
    if (!ja.at("item").is_null()) a.item = ja.at("item").get<int>();
    r.agents.push_back(a);
  }
  for (const auto& ji : j.at("items")) {
    r.items.push_back({ji.at("id").get<int>(), {ji.at("x").get<int>(), ji.at("y").get<int>()}});
  }
  for (const auto& je : j.at("events")) {
    Event e;
    const auto kind = je.at("kind").get<std::string>();
    e.kind = kind == "pickup" ? EventKind::Pickup : kind == "delivery" ? EventKind::Delivery : EventKind::Spawn;
    e.agent = je.at("agent").get<int>();
    e.item = je.at("item").get<int>();
    e.cell = {je.at("x").get<int>(), je.at("y").get<int>()};
    e.step = r.step;
    e.reward = je.at("reward").get<double>();
    r.events.push_back(e);
  }
  r.replanned = j.at("replanned").get<bool>();
  r.replan_failed = j.at("replan_failed").get<bool>();
  r.replan_secs = j.at("replan_secs").get<double>();
  r.expansions = j.at("expansions").get<std::int64_t>();
  return r;
}

}  // namespace mapd
