#pragma once

// Brute-force references used only by the tests. None of these share code
// with the solvers they check beyond the plain data types.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <queue>
#include <random>
#include <set>
#include <span>
#include <tuple>
#include <vector>

#include "mapd/mapf.hpp"

namespace oracle {

using mapd::Cell;
using mapd::Constraint;
using mapd::ConstraintKind;
using mapd::PlanningGraph;

inline std::vector<Cell> moves_from(const PlanningGraph& g, Cell c) {
  std::vector<Cell> out{c};
  const Cell nb[] = {{c.x, c.y - 1}, {c.x, c.y + 1}, {c.x - 1, c.y}, {c.x + 1, c.y}};
  for (Cell n : nb) {
    if (g.has_edge(c, n)) out.push_back(n);
  }
  return out;
}

inline bool vertex_blocked(std::span<const Constraint> cs, Cell v, int t) {
  for (const auto& c : cs) {
    if (c.kind == ConstraintKind::Vertex && c.from == v && c.t == t) return true;
  }
  return false;
}

inline bool edge_blocked(std::span<const Constraint> cs, Cell a, Cell b, int t) {
  for (const auto& c : cs) {
    if (c.kind == ConstraintKind::Edge && c.from == a && c.to == b && c.t == t) return true;
  }
  return false;
}

// Can an agent that arrives at `goal` at time t stay there forever?
inline bool can_stay(std::span<const Constraint> cs, Cell goal, int t) {
  for (const auto& c : cs) {
    if (c.kind == ConstraintKind::Vertex && c.from == goal && c.t >= t) return false;
  }
  return true;
}

// Layered breadth-first sweep over (vertex, time): the set of vertices
// reachable at each time step, up to `horizon`. Returns the first time the
// agent can be at the goal and stay, or nullopt.
inline std::optional<int> space_time_min_cost(const PlanningGraph& g, Cell start, Cell goal,
                                              std::span<const Constraint> cs, int horizon) {
  if (vertex_blocked(cs, start, 0)) return std::nullopt;
  std::set<Cell> layer{start};
  for (int t = 0; t <= horizon; ++t) {
    if (layer.contains(goal) && can_stay(cs, goal, t)) return t;
    std::set<Cell> next;
    for (Cell v : layer) {
      for (Cell n : moves_from(g, v)) {
        if (vertex_blocked(cs, n, t + 1)) continue;
        if (n != v && edge_blocked(cs, v, n, t)) continue;
        next.insert(n);
      }
    }
    layer = std::move(next);
    if (layer.empty()) return std::nullopt;
  }
  return std::nullopt;
}

// Optimal sum-of-costs over the joint state space: Dijkstra over (positions,
// finished flags). An unfinished agent pays one per step; an agent standing on
// its goal may declare itself finished for free and then never moves again.
// Returns nullopt if no conflict-free joint plan exists.
inline std::optional<int> joint_optimal_soc(const std::vector<PlanningGraph>& graphs,
                                            const std::vector<Cell>& starts, const std::vector<Cell>& goals) {
  const std::size_t n = starts.size();
  using State = std::pair<std::vector<Cell>, unsigned>;
  std::map<State, int> dist;
  using Item = std::tuple<int, std::vector<Cell>, unsigned>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
  const unsigned all = (1u << n) - 1;
  dist[{starts, 0u}] = 0;
  pq.push({0, starts, 0u});
  while (!pq.empty()) {
    auto [d, pos, fin] = pq.top();
    pq.pop();
    auto it = dist.find({pos, fin});
    if (it != dist.end() && it->second < d) continue;
    if (fin == all) return d;

    auto relax = [&](std::vector<Cell> p, unsigned f, int nd) {
      State key{p, f};
      auto found = dist.find(key);
      if (found == dist.end() || nd < found->second) {
        dist[key] = nd;
        pq.push({nd, std::move(p), f});
      }
    };

    for (std::size_t i = 0; i < n; ++i) {
      if (!(fin >> i & 1u) && pos[i] == goals[i]) relax(pos, fin | (1u << i), d);
    }

    const int step_cost = static_cast<int>(n) - std::popcount(fin);
    std::vector<std::vector<Cell>> options(n);
    for (std::size_t i = 0; i < n; ++i) {
      options[i] = (fin >> i & 1u) ? std::vector<Cell>{pos[i]} : moves_from(graphs[i], pos[i]);
    }
    std::vector<Cell> next(n);
    std::function<void(std::size_t)> choose = [&](std::size_t i) {
      if (i == n) {
        for (std::size_t a = 0; a < n; ++a) {
          for (std::size_t b = a + 1; b < n; ++b) {
            if (next[a] == next[b]) return;
            if (next[a] == pos[b] && next[b] == pos[a] && pos[a] != pos[b]) return;
          }
        }
        relax(next, fin, d + step_cost);
        return;
      }
      for (Cell c : options[i]) {
        next[i] = c;
        choose(i + 1);
      }
    };
    choose(0);
  }
  return std::nullopt;
}

// Direct O(n^2 T) scan, reporting conflicts as plain tuples
// (t, a1, kind, a2, v1.x, v1.y, v2.x, v2.y) with kind 0 = vertex, 1 = edge.
using ConflictTuple = std::tuple<int, int, int, int, int, int, int, int>;

inline std::vector<ConflictTuple> naive_conflicts(const std::vector<mapd::Path>& paths) {
  std::size_t T = 0;
  for (const auto& p : paths) T = std::max(T, p.vertices.size());
  auto pos = [](const mapd::Path& p, std::size_t t) {
    return t < p.vertices.size() ? p.vertices[t] : p.vertices.back();
  };
  std::vector<ConflictTuple> out;
  for (std::size_t t = 0; t < T; ++t) {
    for (const auto& a : paths) {
      for (const auto& b : paths) {
        if (a.agent >= b.agent) continue;
        if (pos(a, t) == pos(b, t)) {
          out.emplace_back(static_cast<int>(t), a.agent, 0, b.agent, pos(a, t).x, pos(a, t).y, pos(a, t).x,
                           pos(a, t).y);
        }
        if (t + 1 < T && pos(a, t) != pos(a, t + 1) && pos(a, t) == pos(b, t + 1) && pos(a, t + 1) == pos(b, t)) {
          out.emplace_back(static_cast<int>(t), a.agent, 1, b.agent, pos(a, t).x, pos(a, t).y, pos(a, t + 1).x,
                           pos(a, t + 1).y);
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<ConflictTuple> as_tuples(const std::vector<mapd::Conflict>& cs) {
  std::vector<ConflictTuple> out;
  for (const auto& c : cs) {
    out.emplace_back(c.t, c.a1, c.kind == mapd::ConflictKind::Vertex ? 0 : 1, c.a2, c.v1.x, c.v1.y, c.v2.x, c.v2.y);
  }
  return out;
}

// Random grid with obstacles whose free cells stay 4-connected.
inline PlanningGraph random_connected_grid(std::mt19937_64& rng, int w, int h, double obstacle_rate) {
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(w * h), 1);
  std::vector<int> order(static_cast<std::size_t>(w * h));
  for (int i = 0; i < w * h; ++i) order[static_cast<std::size_t>(i)] = i;
  std::shuffle(order.begin(), order.end(), rng);
  std::bernoulli_distribution drop(obstacle_rate);
  auto connected = [&] {
    int first = -1;
    int free = 0;
    for (int i = 0; i < w * h; ++i) {
      if (mask[static_cast<std::size_t>(i)]) {
        ++free;
        if (first < 0) first = i;
      }
    }
    if (first < 0) return false;
    std::vector<char> seen(mask.size(), 0);
    std::queue<int> q;
    q.push(first);
    seen[static_cast<std::size_t>(first)] = 1;
    int reached = 0;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      ++reached;
      const int x = u % w;
      const int y = u / w;
      const int nb[4][2] = {{x, y - 1}, {x, y + 1}, {x - 1, y}, {x + 1, y}};
      for (auto& p : nb) {
        if (p[0] < 0 || p[1] < 0 || p[0] >= w || p[1] >= h) continue;
        const int v = p[1] * w + p[0];
        if (mask[static_cast<std::size_t>(v)] && !seen[static_cast<std::size_t>(v)]) {
          seen[static_cast<std::size_t>(v)] = 1;
          q.push(v);
        }
      }
    }
    return reached == free;
  };
  for (int i : order) {
    if (!drop(rng)) continue;
    mask[static_cast<std::size_t>(i)] = 0;
    if (!connected()) mask[static_cast<std::size_t>(i)] = 1;
  }
  return PlanningGraph(w, h, std::move(mask));
}

inline std::vector<Cell> free_cells(const PlanningGraph& g) {
  std::vector<Cell> out;
  for (int i = 0; i < g.size(); ++i) {
    if (g.contains(g.cell(i))) out.push_back(g.cell(i));
  }
  return out;
}

}  // namespace oracle
