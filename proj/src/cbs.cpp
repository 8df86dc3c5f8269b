#include "mapd/cbs.hpp"

#include <algorithm>
#include <queue>
#include <set>
#include <stdexcept>

#include "mapd/rng.hpp"

namespace mapd {

void MAPFInstance::validate() const {
  const auto n = starts.size();
  if (n == 0) throw std::invalid_argument("MAPF instance has no agents");
  if (goals.size() != n || graphs.size() != n) {
    throw std::invalid_argument("MAPF instance: starts, goals and graph views differ in size");
  }
  std::set<Cell> seen_start;
  std::set<Cell> seen_goal;
  for (std::size_t i = 0; i < n; ++i) {
    if (!seen_start.insert(starts[i]).second) {
      throw std::invalid_argument("MAPF instance: start " + to_string(starts[i]) + " is shared");
    }
    if (!seen_goal.insert(goals[i]).second) {
      throw std::invalid_argument("MAPF instance: goal " + to_string(goals[i]) + " is shared");
    }
    if (!graphs[i].contains(starts[i]) || !graphs[i].contains(goals[i])) {
      throw std::invalid_argument("MAPF instance: agent " + std::to_string(i) +
                                  " start or goal lies outside its graph view");
    }
  }
}

MAPFInstance make_instance(const PlanningGraph& graph, std::vector<Cell> starts, std::vector<Cell> goals) {
  MAPFInstance inst;
  inst.graphs.assign(starts.size(), graph);
  inst.starts = std::move(starts);
  inst.goals = std::move(goals);
  return inst;
}

const char* to_string(CbsStatus s) {
  switch (s) {
    case CbsStatus::Solved: return "solved";
    case CbsStatus::Exhausted: return "exhausted";
    case CbsStatus::Infeasible: return "infeasible";
  }
  return "?";
}

std::vector<Constraint> CTNode::constraints_for(int agent) const {
  std::vector<Constraint> out;
  for (const CTNode* n = this; n != nullptr; n = n->parent.get()) {
    if (n->added && n->added->agent == agent) out.push_back(*n->added);
  }
  return out;
}

std::vector<Constraint> CTNode::all_constraints() const {
  std::vector<Constraint> out;
  for (const CTNode* n = this; n != nullptr; n = n->parent.get()) {
    if (n->added) out.push_back(*n->added);
  }
  return out;
}

std::vector<Path> CTNode::paths() const {
  std::vector<Path> out;
  out.reserve(solution.size());
  for (const auto& p : solution) out.push_back(*p);
  return out;
}

CbsSolver::CbsSolver(MAPFInstance instance, Budget budget)
    : instance_(std::move(instance)), budget_(budget) {
  instance_.validate();
  makespan_cap_ = budget_.makespan_cap;
  if (makespan_cap_ <= 0) {
    int area = 0;
    for (const auto& g : instance_.graphs) area = std::max(area, g.size());
    makespan_cap_ = area * instance_.agents();
  }
  heuristics_.reserve(instance_.goals.size());
  for (int i = 0; i < instance_.agents(); ++i) {
    heuristics_.emplace_back(instance_.graphs[static_cast<std::size_t>(i)],
                             instance_.goals[static_cast<std::size_t>(i)]);
  }
}

std::optional<Path> CbsSolver::plan(int agent, std::span<const Constraint> constraints,
                                    const std::vector<std::shared_ptr<const Path>>* others) const {
  const auto i = static_cast<std::size_t>(agent);
  const auto& graph = instance_.graphs[i];
  const int horizon = std::min(default_horizon(graph, constraints), makespan_cap_);
  std::vector<const Path*> avoid;
  if (others) {
    for (const auto& p : *others) {
      if (p->agent != agent) avoid.push_back(p.get());
    }
  }
  const ConflictAvoidanceTable cat{std::span<const Path* const>(avoid)};
  auto path = space_time_search(graph, heuristics_[i], instance_.starts[i], constraints, horizon, nullptr, &cat);
  if (path) path->agent = agent;
  return path;
}

std::optional<CTNode> CbsSolver::root() const {
  CTNode node;
  for (int i = 0; i < instance_.agents(); ++i) {
    auto p = plan(i, {}, &node.solution);
    if (!p) return std::nullopt;
    node.cost += p->cost();
    node.solution.push_back(std::make_shared<const Path>(std::move(*p)));
  }
  node.conflicts = detect_conflicts(node.paths());
  return node;
}

std::vector<CTNode> CbsSolver::expand(const std::shared_ptr<const CTNode>& node,
                                      const Conflict& conflict) const {
  if (std::find(node->conflicts.begin(), node->conflicts.end(), conflict) == node->conflicts.end()) {
    throw std::invalid_argument("conflict " + to_string(conflict) + " is not in the node");
  }
  const auto [first, second] = split_conflict(conflict);
  std::vector<CTNode> children;
  for (const Constraint& c : {first, second}) {
    auto constraints = node->constraints_for(c.agent);
    constraints.push_back(c);
    auto p = plan(c.agent, constraints, &node->solution);
    if (!p) continue;

    CTNode child;
    child.parent = node;
    child.added = c;
    child.depth = node->depth + 1;
    child.solution = node->solution;
    const auto slot = static_cast<std::size_t>(c.agent);
    child.cost = node->cost - child.solution[slot]->cost() + p->cost();
    child.solution[slot] = std::make_shared<const Path>(std::move(*p));
    // Only pairs with the replanned agent change. Goals are distinct, so a
    // pair cannot conflict after both of its paths have ended.
    for (const auto& k : node->conflicts) {
      if (k.a1 != c.agent && k.a2 != c.agent) child.conflicts.push_back(k);
    }
    const Path& mine = *child.solution[slot];
    for (const auto& other : child.solution) {
      if (other->agent == c.agent) continue;
      const int horizon = std::max(mine.cost(), other->cost()) + 1;
      append_pair_conflicts(mine, *other, horizon, child.conflicts);
    }
    std::sort(child.conflicts.begin(), child.conflicts.end(), conflict_order);
    children.push_back(std::move(child));
  }
  return children;
}

CbsResult CbsSolver::solve(std::uint64_t seed) const {
  using Clock = std::chrono::steady_clock;
  const auto t0 = Clock::now();
  CbsResult result;
  auto elapsed = [&] { return std::chrono::duration<double>(Clock::now() - t0).count(); };

  auto root_node = root();
  if (!root_node) {
    result.status = CbsStatus::Infeasible;
    result.seconds = elapsed();
    return result;
  }

  struct Entry {
    std::shared_ptr<const CTNode> node;
    std::uint64_t seq;
  };
  // lowest cost, then fewer conflicts, then first inserted
  auto worse = [](const Entry& a, const Entry& b) {
    if (a.node->cost != b.node->cost) return a.node->cost > b.node->cost;
    if (a.node->conflicts.size() != b.node->conflicts.size()) {
      return a.node->conflicts.size() > b.node->conflicts.size();
    }
    return a.seq > b.seq;
  };
  std::priority_queue<Entry, std::vector<Entry>, decltype(worse)> open(worse);
  std::uint64_t seq = 0;
  open.push({std::make_shared<const CTNode>(std::move(*root_node)), seq++});
  result.generated = 1;

  Rng rng(seed);
  while (!open.empty()) {
    if (result.expansions >= budget_.max_expansions || elapsed() > budget_.wall_time_limit) {
      result.status = CbsStatus::Exhausted;
      result.seconds = elapsed();
      return result;
    }
    auto node = open.top().node;
    open.pop();
    if (node->conflicts.empty()) {
      result.status = CbsStatus::Solved;
      result.paths = node->paths();
      result.cost = node->cost;
      result.seconds = elapsed();
      return result;
    }
    ++result.expansions;
    const auto& conflict = node->conflicts[uniform_index(rng, node->conflicts.size())];
    for (auto& child : expand(node, conflict)) {
      open.push({std::make_shared<const CTNode>(std::move(child)), seq++});
      ++result.generated;
    }
  }
  result.status = CbsStatus::Infeasible;
  result.seconds = elapsed();
  return result;
}

CbsResult cbs_solve(const MAPFInstance& instance, std::uint64_t seed, const Budget& budget) {
  return CbsSolver(instance, budget).solve(seed);
}

std::vector<CTNode> expand_node(const CTNode& node, const Conflict& conflict, const MAPFInstance& instance) {
  return CbsSolver(instance).expand(std::make_shared<const CTNode>(node), conflict);
}

}  // namespace mapd
