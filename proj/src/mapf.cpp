#include "mapd/mapf.hpp"

#include <algorithm>
#include <climits>
#include <queue>
#include <tuple>

namespace mapd {

PlanningGraph::PlanningGraph(int width, int height, std::vector<std::uint8_t> passable,
                             std::vector<std::uint8_t> no_entry)
    : width_(width), height_(height), passable_(std::move(passable)), no_entry_(std::move(no_entry)) {
  const auto n = static_cast<std::size_t>(width * height);
  if (width <= 0 || height <= 0 || passable_.size() != n) {
    throw std::invalid_argument("PlanningGraph: mask size does not match dimensions");
  }
  if (no_entry_.empty()) no_entry_.assign(n, 0);
  if (no_entry_.size() != n) throw std::invalid_argument("PlanningGraph: no_entry mask size mismatch");
}

PlanningGraph PlanningGraph::open_grid(int width, int height) {
  return PlanningGraph(width, height, std::vector<std::uint8_t>(static_cast<std::size_t>(width * height), 1));
}

PlanningGraph PlanningGraph::from_rows(std::span<const std::string> rows) {
  if (rows.empty()) throw std::invalid_argument("PlanningGraph: no rows");
  const int w = static_cast<int>(rows.front().size());
  std::vector<std::uint8_t> mask;
  for (const auto& r : rows) {
    if (static_cast<int>(r.size()) != w) throw std::invalid_argument("PlanningGraph: ragged rows");
    for (char ch : r) mask.push_back(ch == '@' ? 0 : 1);
  }
  return PlanningGraph(w, static_cast<int>(rows.size()), std::move(mask));
}

int PlanningGraph::vertex_count() const {
  return static_cast<int>(std::count(passable_.begin(), passable_.end(), std::uint8_t{1}));
}

std::vector<Cell> PlanningGraph::successors(Cell c) const {
  std::vector<Cell> out;
  if (!contains(c)) return out;
  for (Move m : {Move::Up, Move::Down, Move::Left, Move::Right}) {
    const Cell n = apply_move(c, m);
    if (enterable(n)) out.push_back(n);
  }
  return out;
}

DistanceTable::DistanceTable(const PlanningGraph& graph, Cell goal)
    : goal_(goal), dist_(static_cast<std::size_t>(graph.size()), kUnreachable) {
  if (!graph.contains(goal)) return;
  // Backward BFS: w precedes u when the edge w -> u exists.
  std::queue<Cell> q;
  dist_[static_cast<std::size_t>(graph.index(goal))] = 0;
  q.push(goal);
  while (!q.empty()) {
    const Cell u = q.front();
    q.pop();
    const int du = dist_[static_cast<std::size_t>(graph.index(u))];
    for (Move m : {Move::Up, Move::Down, Move::Left, Move::Right}) {
      const Cell w = apply_move(u, m);
      if (!graph.has_edge(w, u)) continue;
      auto& dw = dist_[static_cast<std::size_t>(graph.index(w))];
      if (dw == kUnreachable) {
        dw = du + 1;
        q.push(w);
      }
    }
  }
}

std::string to_string(const Constraint& c) {
  if (c.kind == ConstraintKind::Vertex) {
    return "Vertex(" + to_string(c.from) + ", t=" + std::to_string(c.t) + ")@" + std::to_string(c.agent);
  }
  return "Edge(" + to_string(c.from) + "->" + to_string(c.to) + ", t=" + std::to_string(c.t) + ")@" +
         std::to_string(c.agent);
}

std::string to_string(const Conflict& c) {
  const std::string who = std::to_string(c.a1) + "," + std::to_string(c.a2);
  if (c.kind == ConflictKind::Vertex) {
    return "Vertex<" + who + ", " + to_string(c.v1) + ", t=" + std::to_string(c.t) + ">";
  }
  return "Edge<" + who + ", " + to_string(c.v1) + "->" + to_string(c.v2) + ", t=" + std::to_string(c.t) + ">";
}

bool conflict_order(const Conflict& a, const Conflict& b) {
  return std::tie(a.t, a.a1, a.kind, a.a2, a.v1, a.v2) < std::tie(b.t, b.a1, b.kind, b.a2, b.v1, b.v2);
}

int default_horizon(const PlanningGraph& graph, std::span<const Constraint> constraints) {
  int latest = -1;
  for (const auto& c : constraints) latest = std::max(latest, c.t);
  return graph.size() + latest + 1;
}

std::optional<Path> space_time_search(const PlanningGraph& graph, Cell start, Cell goal,
                                      std::span<const Constraint> constraints, int horizon) {
  if (!graph.contains(goal)) throw PlanningError("goal " + to_string(goal) + " is not in the graph");
  const DistanceTable table(graph, goal);
  return space_time_search(graph, table, start, constraints, horizon);
}

ConflictAvoidanceTable::ConflictAvoidanceTable(std::span<const Path> others) {
  std::vector<const Path*> ptrs;
  for (const auto& p : others) ptrs.push_back(&p);
  *this = ConflictAvoidanceTable(std::span<const Path* const>(ptrs));
}

ConflictAvoidanceTable::ConflictAvoidanceTable(std::span<const Path* const> others) {
  std::vector<const Path*> kept;
  for (const Path* p : others) {
    if (p->vertices.empty()) continue;
    kept.push_back(p);
    layers_ = std::max(layers_, static_cast<int>(p->vertices.size()));
  }
  paths_ = static_cast<int>(kept.size());
  cells_.resize(static_cast<std::size_t>(paths_) * static_cast<std::size_t>(layers_));
  for (int i = 0; i < paths_; ++i) {
    for (int t = 0; t < layers_; ++t) cells_[static_cast<std::size_t>(t * paths_ + i)] = kept[static_cast<std::size_t>(i)]->at(t);
  }
}

int ConflictAvoidanceTable::count(Cell from, Cell to, int t) const {
  if (paths_ == 0) return 0;
  const Cell* now = &cells_[static_cast<std::size_t>(std::min(t, layers_ - 1) * paths_)];
  const Cell* next = &cells_[static_cast<std::size_t>(std::min(t + 1, layers_ - 1) * paths_)];
  int n = 0;
  for (int i = 0; i < paths_; ++i) {
    if (next[i] == to) ++n;
    else if (from != to && next[i] == from && now[i] == to) ++n;
  }
  return n;
}

namespace {

struct SearchNode {
  int v;
  int t;  // also g: every action costs one step
  int f;
  int conflicts;  // against the avoidance table, along the path so far
  int parent;
};

constexpr Move kStepMoves[] = {Move::Up, Move::Down, Move::Left, Move::Right};

// Index into kStepMoves of the step from a to b, or -1 if they are not adjacent.
int step_index(Cell a, Cell b) {
  for (int i = 0; i < 4; ++i) {
    if (apply_move(a, kStepMoves[i]) == b) return i;
  }
  return -1;
}

}  // namespace

std::optional<Path> space_time_search(const PlanningGraph& graph, const DistanceTable& heuristic,
                                      Cell start, std::span<const Constraint> constraints,
                                      int horizon, SearchStats* stats,
                                      const ConflictAvoidanceTable* avoid) {
  const Cell goal = heuristic.goal();
  if (!graph.contains(start)) throw PlanningError("start " + to_string(start) + " is not in the graph");
  if (!graph.contains(goal)) throw PlanningError("goal " + to_string(goal) + " is not in the graph");
  if (horizon < 0) return std::nullopt;
  if (heuristic.at(graph, start) == DistanceTable::kUnreachable) return std::nullopt;

  int latest = -1;
  for (const auto& c : constraints) latest = std::max(latest, c.t);
  const auto size = static_cast<std::size_t>(graph.size());
  const auto blocked_layers = static_cast<std::size_t>(latest + 1);
  // (t, v) and (t, v, step) for t <= latest
  std::vector<std::uint8_t> vertex_block(blocked_layers * size, 0);
  std::vector<std::uint8_t> edge_block(blocked_layers * size * 4, 0);
  int goal_block = -1;
  for (const auto& c : constraints) {
    if (c.t < 0 || !graph.contains(c.from)) continue;
    const auto at = static_cast<std::size_t>(c.t) * size + static_cast<std::size_t>(graph.index(c.from));
    if (c.kind == ConstraintKind::Vertex) {
      vertex_block[at] = 1;
      if (c.from == goal) goal_block = std::max(goal_block, c.t);
    } else if (graph.contains(c.to)) {
      const int step = step_index(c.from, c.to);
      if (step >= 0) edge_block[at * 4 + static_cast<std::size_t>(step)] = 1;
    }
  }
  auto vertex_blocked = [&](int v, int t) {
    return t <= latest && vertex_block[static_cast<std::size_t>(t) * size + static_cast<std::size_t>(v)];
  };
  auto edge_blocked = [&](int v, int step, int t) {
    return t <= latest &&
           edge_block[(static_cast<std::size_t>(t) * size + static_cast<std::size_t>(v)) * 4 + static_cast<std::size_t>(step)];
  };
  const int goal_index = graph.index(goal);

  // Past the latest constraint every (v, t) is equivalent to (v, latest + 1),
  // so the closed table only needs latest + 2 time layers.
  const int layers = latest + 2;
  struct Best {
    int g = INT_MAX;
    int conflicts = INT_MAX;
  };
  std::vector<Best> best(static_cast<std::size_t>(graph.size()) * static_cast<std::size_t>(layers));
  auto slot = [&](int v, int t) -> Best& {
    const int layer = std::min(t, latest + 1);
    return best[static_cast<std::size_t>(layer) * static_cast<std::size_t>(graph.size()) +
                static_cast<std::size_t>(v)];
  };
  auto h = [&](int v, int t) {
    const int d = heuristic.at(graph, graph.cell(v));
    return std::max(d, goal_block + 1 - t);
  };

  std::vector<SearchNode> nodes;
  // (f asc, conflicts asc, g desc, insertion order asc)
  auto worse = [&](int a, int b) {
    const auto& x = nodes[static_cast<std::size_t>(a)];
    const auto& y = nodes[static_cast<std::size_t>(b)];
    if (x.f != y.f) return x.f > y.f;
    if (x.conflicts != y.conflicts) return x.conflicts > y.conflicts;
    if (x.t != y.t) return x.t < y.t;
    return a > b;
  };
  std::priority_queue<int, std::vector<int>, decltype(worse)> open(worse);

  const int s = graph.index(start);
  if (vertex_blocked(s, 0)) return std::nullopt;
  nodes.push_back({s, 0, h(s, 0), 0, -1});
  slot(s, 0) = {0, 0};
  open.push(0);
  if (stats) ++stats->generated;

  while (!open.empty()) {
    const int ni = open.top();
    open.pop();
    const SearchNode cur = nodes[static_cast<std::size_t>(ni)];
    const Best& seen = slot(cur.v, cur.t);
    if (cur.t > seen.g || (cur.t == seen.g && cur.conflicts > seen.conflicts)) continue;  // stale
    if (stats) ++stats->expanded;

    if (cur.v == goal_index && cur.t > goal_block) {
      Path p;
      for (int i = ni; i >= 0; i = nodes[static_cast<std::size_t>(i)].parent) {
        p.vertices.push_back(graph.cell(nodes[static_cast<std::size_t>(i)].v));
      }
      std::reverse(p.vertices.begin(), p.vertices.end());
      return p;
    }
    if (cur.t >= horizon) continue;

    const Cell here = graph.cell(cur.v);
    const int nt = cur.t + 1;
    auto consider = [&](int nv, int step) {
      if (vertex_blocked(nv, nt)) return;
      if (step >= 0 && edge_blocked(cur.v, step, cur.t)) return;
      if (heuristic.at(graph, graph.cell(nv)) == DistanceTable::kUnreachable) return;
      const int f = nt + h(nv, nt);
      if (f > horizon) return;
      const int conflicts = cur.conflicts + (avoid ? avoid->count(here, graph.cell(nv), cur.t) : 0);
      Best& b = slot(nv, nt);
      if (nt > b.g || (nt == b.g && conflicts >= b.conflicts)) return;
      b = {nt, conflicts};
      nodes.push_back({nv, nt, f, conflicts, ni});
      open.push(static_cast<int>(nodes.size()) - 1);
      if (stats) ++stats->generated;
    };
    consider(cur.v, -1);
    for (int step = 0; step < 4; ++step) {
      const Cell n = apply_move(here, kStepMoves[step]);
      if (graph.enterable(n)) consider(graph.index(n), step);
    }
  }
  return std::nullopt;
}

void append_pair_conflicts(const Path& a, const Path& b, int horizon, std::vector<Conflict>& out) {
  const bool a_first = a.agent < b.agent;
  const Path& lo = a_first ? a : b;
  const Path& hi = a_first ? b : a;
  for (int t = 0; t < horizon; ++t) {
    const Cell l0 = lo.at(t);
    const Cell h0 = hi.at(t);
    if (l0 == h0) out.push_back(Conflict::vertex(lo.agent, hi.agent, l0, t));
    if (t + 1 < horizon) {
      const Cell l1 = lo.at(t + 1);
      if (l0 == hi.at(t + 1) && l1 == h0 && l0 != l1) out.push_back(Conflict::edge(lo.agent, hi.agent, l0, l1, t));
    }
  }
}

std::vector<Conflict> detect_conflicts(std::span<const Path> paths) {
  std::vector<Conflict> out;
  int horizon = 0;
  for (const auto& p : paths) horizon = std::max(horizon, static_cast<int>(p.vertices.size()));
  for (std::size_t i = 0; i < paths.size(); ++i) {
    for (std::size_t j = i + 1; j < paths.size(); ++j) append_pair_conflicts(paths[i], paths[j], horizon, out);
  }
  std::sort(out.begin(), out.end(), conflict_order);
  return out;
}

std::pair<Constraint, Constraint> split_conflict(const Conflict& c) {
  if (c.kind == ConflictKind::Vertex) {
    return {Constraint::vertex(c.a1, c.v1, c.t), Constraint::vertex(c.a2, c.v1, c.t)};
  }
  return {Constraint::edge(c.a1, c.v1, c.v2, c.t), Constraint::edge(c.a2, c.v2, c.v1, c.t)};
}

bool path_respects(const PlanningGraph& graph, const Path& path, std::span<const Constraint> constraints) {
  if (path.vertices.empty()) return false;
  for (std::size_t i = 0; i < path.vertices.size(); ++i) {
    if (!graph.contains(path.vertices[i])) return false;
    if (i > 0 && path.vertices[i] != path.vertices[i - 1] &&
        !graph.has_edge(path.vertices[i - 1], path.vertices[i])) {
      return false;
    }
  }
  for (const auto& c : constraints) {
    if (c.kind == ConstraintKind::Vertex) {
      if (path.at(c.t) == c.from) return false;
    } else if (c.t + 1 <= path.cost() && path.at(c.t) == c.from && path.at(c.t + 1) == c.to) {
      return false;
    }
  }
  return true;
}

}  // namespace mapd
