#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mapd/grid.hpp"

namespace mapd {

// A 4-connected grid graph. `no_entry` cells keep their outgoing edges but
// cannot be entered, which lets a carrying agent leave the shelf it is
// standing on without being routed back through it.
class PlanningGraph {
 public:
  PlanningGraph() = default;
  PlanningGraph(int width, int height, std::vector<std::uint8_t> passable,
                std::vector<std::uint8_t> no_entry = {});

  // Every cell passable.
  static PlanningGraph open_grid(int width, int height);
  static PlanningGraph from_rows(std::span<const std::string> rows);  // '.' free, '@' blocked

  int width() const { return width_; }
  int height() const { return height_; }
  int size() const { return width_ * height_; }
  int vertex_count() const;

  bool contains(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_ && passable_[idx(c)];
  }
  bool enterable(Cell c) const { return contains(c) && !no_entry_[idx(c)]; }
  int index(Cell c) const { return c.y * width_ + c.x; }
  Cell cell(int index) const { return {index % width_, index / width_}; }

  // Directional successors of c in Up, Down, Left, Right order (no Wait).
  std::vector<Cell> successors(Cell c) const;
  bool has_edge(Cell from, Cell to) const {
    return contains(from) && enterable(to) && manhattan(from, to) == 1;
  }

 private:
  std::size_t idx(Cell c) const { return static_cast<std::size_t>(c.y * width_ + c.x); }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> passable_;
  std::vector<std::uint8_t> no_entry_;
};

// Exact shortest-path distances to one goal; kUnreachable where none exists.
class DistanceTable {
 public:
  static constexpr int kUnreachable = -1;

  DistanceTable() = default;
  DistanceTable(const PlanningGraph& graph, Cell goal);

  Cell goal() const { return goal_; }
  int at(const PlanningGraph& graph, Cell c) const {
    return dist_[static_cast<std::size_t>(graph.index(c))];
  }

 private:
  Cell goal_;
  std::vector<int> dist_;
};

struct Path {
  int agent = 0;
  std::vector<Cell> vertices;  // v_0 .. v_T
  int start_step = 0;

  // Arrival time T.
  int cost() const { return static_cast<int>(vertices.size()) - 1; }
  // Position at relative time t; the agent stays at its last vertex afterwards.
  Cell at(int t) const {
    return t < static_cast<int>(vertices.size()) ? vertices[static_cast<std::size_t>(t)]
                                                 : vertices.back();
  }

  bool operator==(const Path&) const = default;
};

enum class ConstraintKind : std::uint8_t { Vertex, Edge };

// Vertex: agent may not be at `from` at time t.
// Edge: agent may not move from `from` at time t to `to` at time t + 1.
struct Constraint {
  ConstraintKind kind = ConstraintKind::Vertex;
  int agent = 0;
  Cell from;
  Cell to;
  int t = 0;

  static Constraint vertex(int agent, Cell v, int t) { return {ConstraintKind::Vertex, agent, v, v, t}; }
  static Constraint edge(int agent, Cell from, Cell to, int t) {
    return {ConstraintKind::Edge, agent, from, to, t};
  }

  auto operator<=>(const Constraint&) const = default;
};

std::string to_string(const Constraint& c);

enum class ConflictKind : std::uint8_t { Vertex, Edge };

// Vertex: agents a1 and a2 both at v1 at time t.
// Edge: a1 moves v1 -> v2 while a2 moves v2 -> v1 between t and t + 1.
// Always a1 < a2.
struct Conflict {
  ConflictKind kind = ConflictKind::Vertex;
  int a1 = 0;
  int a2 = 0;
  Cell v1;
  Cell v2;
  int t = 0;

  static Conflict vertex(int a1, int a2, Cell v, int t) { return {ConflictKind::Vertex, a1, a2, v, v, t}; }
  static Conflict edge(int a1, int a2, Cell v1, Cell v2, int t) {
    return {ConflictKind::Edge, a1, a2, v1, v2, t};
  }

  bool operator==(const Conflict&) const = default;
};

std::string to_string(const Conflict& c);

// Canonical order: time, lower agent id, vertex before edge, then the rest.
bool conflict_order(const Conflict& a, const Conflict& b);

class PlanningError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Occupancy of other agents' paths, used to break ties between equal-cost
// paths in favour of fewer conflicts. Paths are wait-padded at their goal.
class ConflictAvoidanceTable {
 public:
  ConflictAvoidanceTable() = default;
  explicit ConflictAvoidanceTable(std::span<const Path> others);
  explicit ConflictAvoidanceTable(std::span<const Path* const> others);

  bool empty() const { return paths_ == 0; }
  // Conflicts caused by moving from `from` at time t to `to` at time t + 1.
  int count(Cell from, Cell to, int t) const;

 private:
  int paths_ = 0;
  int layers_ = 0;           // longest path length; later times repeat the last layer
  std::vector<Cell> cells_;  // position of path i at time t at [t * paths_ + i]
};

struct SearchStats {
  std::int64_t expanded = 0;
  std::int64_t generated = 0;
};

// Minimum-cost path from start to goal obeying `constraints` (the agent field
// is ignored; callers pass only this agent's constraints). After arriving the
// agent stays at the goal, so a goal vertex constraint at or after the arrival
// time rules that arrival out. Returns nullopt if no path arrives within
// `horizon` steps. Throws PlanningError if start or goal is not in the graph.
std::optional<Path> space_time_search(const PlanningGraph& graph, Cell start, Cell goal,
                                      std::span<const Constraint> constraints, int horizon);

// Same, with a precomputed heuristic for `goal`.
// Among equal-cost paths, ones with fewer conflicts against `avoid` win.
std::optional<Path> space_time_search(const PlanningGraph& graph, const DistanceTable& heuristic,
                                      Cell start, std::span<const Constraint> constraints,
                                      int horizon, SearchStats* stats = nullptr,
                                      const ConflictAvoidanceTable* avoid = nullptr);

// Search horizon used by the solvers: area + latest constraint time + 1.
int default_horizon(const PlanningGraph& graph, std::span<const Constraint> constraints);

// All pairwise vertex and edge conflicts, shorter paths padded by waiting at
// their final vertex. Sorted by conflict_order.
std::vector<Conflict> detect_conflicts(std::span<const Path> paths);

// Conflicts between two paths at times [0, horizon), appended unsorted.
void append_pair_conflicts(const Path& a, const Path& b, int horizon, std::vector<Conflict>& out);

// One constraint per conflicting agent; a third agent is never constrained.
std::pair<Constraint, Constraint> split_conflict(const Conflict& c);

// True if `path` is a valid walk on `graph` that respects every constraint,
// including the stay-at-goal tail.
bool path_respects(const PlanningGraph& graph, const Path& path,
                   std::span<const Constraint> constraints);

}  // namespace mapd
