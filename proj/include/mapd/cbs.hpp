#pragma once

#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "mapd/mapf.hpp"

namespace mapd {

struct MAPFInstance {
  std::vector<PlanningGraph> graphs;  // one view per agent
  std::vector<Cell> starts;
  std::vector<Cell> goals;

  int agents() const { return static_cast<int>(starts.size()); }
  // Throws std::invalid_argument on size mismatch, shared starts or goals, or
  // a start/goal outside its agent's view.
  void validate() const;
};

// Every agent plans on the same graph.
MAPFInstance make_instance(const PlanningGraph& graph, std::vector<Cell> starts, std::vector<Cell> goals);

struct Budget {
  std::int64_t max_expansions = 50'000;
  double wall_time_limit = 30.0;  // seconds
  // Upper bound on any single path's arrival time. 0 means area * agents.
  int makespan_cap = 0;
};

// A constraint-tree node. Constraints are stored as a chain to the parent so
// children share everything but the constraint they add.
struct CTNode {
  std::shared_ptr<const CTNode> parent;
  std::optional<Constraint> added;
  std::vector<std::shared_ptr<const Path>> solution;
  int cost = 0;
  std::vector<Conflict> conflicts;
  int depth = 0;

  // Every constraint on `agent` from the root down to this node.
  std::vector<Constraint> constraints_for(int agent) const;
  std::vector<Constraint> all_constraints() const;
  std::vector<Path> paths() const;
};

enum class CbsStatus { Solved, Exhausted, Infeasible };

const char* to_string(CbsStatus s);

struct CbsResult {
  CbsStatus status = CbsStatus::Infeasible;
  std::vector<Path> paths;
  int cost = 0;
  std::int64_t expansions = 0;
  std::int64_t generated = 0;
  double seconds = 0.0;
};

// Holds the per-agent heuristic tables for one instance.
class CbsSolver {
 public:
  CbsSolver(MAPFInstance instance, Budget budget = {});

  const MAPFInstance& instance() const { return instance_; }
  int makespan_cap() const { return makespan_cap_; }

  // Root node: unconstrained optimal path per agent. nullopt if some agent
  // cannot reach its goal at all.
  std::optional<CTNode> root() const;

  // Children of `node` for one of its conflicts. Each child adds one
  // constraint and replans only the constrained agent; infeasible children are
  // dropped. Throws std::invalid_argument if `conflict` is not in node.conflicts.
  std::vector<CTNode> expand(const std::shared_ptr<const CTNode>& node, const Conflict& conflict) const;

  CbsResult solve(std::uint64_t seed) const;

 private:
  std::optional<Path> plan(int agent, std::span<const Constraint> constraints,
                           const std::vector<std::shared_ptr<const Path>>* others) const;

  MAPFInstance instance_;
  Budget budget_;
  int makespan_cap_ = 0;
  std::vector<DistanceTable> heuristics_;
};

CbsResult cbs_solve(const MAPFInstance& instance, std::uint64_t seed, const Budget& budget = {});

std::vector<CTNode> expand_node(const CTNode& node, const Conflict& conflict, const MAPFInstance& instance);

}  // namespace mapd
