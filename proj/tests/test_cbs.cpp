#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "mapd/cbs.hpp"
#include "oracles.hpp"

using namespace mapd;

namespace {

struct RandomInstance {
  MAPFInstance instance;
  std::optional<int> optimum;
};

RandomInstance random_instance(std::mt19937_64& rng, int max_agents) {
  const int w = std::uniform_int_distribution<int>(2, 4)(rng);
  const int h = std::uniform_int_distribution<int>(2, 4)(rng);
  const auto g = oracle::random_connected_grid(rng, w, h, 0.2);
  auto cells = oracle::free_cells(g);
  const int n = std::min<int>(std::uniform_int_distribution<int>(1, max_agents)(rng), static_cast<int>(cells.size()));
  std::shuffle(cells.begin(), cells.end(), rng);
  std::vector<Cell> starts(cells.begin(), cells.begin() + n);
  std::shuffle(cells.begin(), cells.end(), rng);
  std::vector<Cell> goals(cells.begin(), cells.begin() + n);
  auto inst = make_instance(g, starts, goals);
  auto opt = oracle::joint_optimal_soc(inst.graphs, inst.starts, inst.goals);
  return {std::move(inst), opt};
}

void check_sound(const MAPFInstance& inst, const CbsResult& r) {
  REQUIRE(r.paths.size() == static_cast<std::size_t>(inst.agents()));
  int soc = 0;
  for (int i = 0; i < inst.agents(); ++i) {
    const auto& p = r.paths[static_cast<std::size_t>(i)];
    CHECK(p.agent == i);
    CHECK(p.vertices.front() == inst.starts[static_cast<std::size_t>(i)]);
    CHECK(p.vertices.back() == inst.goals[static_cast<std::size_t>(i)]);
    CHECK(path_respects(inst.graphs[static_cast<std::size_t>(i)], p, {}));
    soc += p.cost();
  }
  CHECK(soc == r.cost);
  CHECK(detect_conflicts(r.paths).empty());
}

}  // namespace

TEST_CASE("one agent gets its shortest path") {
  const std::vector<std::string> rows{"....", ".@@.", "...."};
  const auto g = PlanningGraph::from_rows(rows);
  const auto inst = make_instance(g, {{0, 1}}, {{3, 1}});
  const auto r = cbs_solve(inst, 0);
  REQUIRE(r.status == CbsStatus::Solved);
  CHECK(r.cost == 5);
  CHECK(r.expansions == 0);
  check_sound(inst, r);
}

TEST_CASE("crossing at the centre of a 3x3 grid") {
  const auto g = PlanningGraph::open_grid(3, 3);
  const auto inst = make_instance(g, {{0, 1}, {1, 0}}, {{2, 1}, {1, 2}});
  CHECK(oracle::joint_optimal_soc(inst.graphs, inst.starts, inst.goals) == 5);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto r = cbs_solve(inst, seed);
    REQUIRE(r.status == CbsStatus::Solved);
    CHECK(r.cost == 5);
    check_sound(inst, r);
  }
}

TEST_CASE("pure swap in a corridor is infeasible") {
  const auto g = PlanningGraph::open_grid(3, 1);
  const auto inst = make_instance(g, {{0, 0}, {2, 0}}, {{2, 0}, {0, 0}});
  CHECK_FALSE(oracle::joint_optimal_soc(inst.graphs, inst.starts, inst.goals));
  const auto r = cbs_solve(inst, 0);
  CHECK(r.status == CbsStatus::Infeasible);
  CHECK(r.paths.empty());
}

TEST_CASE("unreachable goal is infeasible at the root") {
  const std::vector<std::string> rows{".@."};
  const auto g = PlanningGraph::from_rows(rows);
  const auto r = cbs_solve(make_instance(g, {{0, 0}}, {{2, 0}}), 0);
  CHECK(r.status == CbsStatus::Infeasible);
  CHECK(r.expansions == 0);
}

TEST_CASE("instance validation") {
  const auto g = PlanningGraph::open_grid(3, 3);
  CHECK_THROWS_AS(cbs_solve(make_instance(g, {}, {}), 0), std::invalid_argument);
  CHECK_THROWS_AS(cbs_solve(make_instance(g, {{0, 0}, {0, 0}}, {{1, 1}, {2, 2}}), 0), std::invalid_argument);
  CHECK_THROWS_AS(cbs_solve(make_instance(g, {{0, 0}, {1, 0}}, {{2, 2}, {2, 2}}), 0), std::invalid_argument);
  CHECK_THROWS_AS(cbs_solve(make_instance(g, {{0, 0}}, {{5, 5}}), 0), std::invalid_argument);
  auto bad = make_instance(g, {{0, 0}}, {{1, 1}});
  bad.goals.push_back({2, 2});
  CHECK_THROWS_AS(cbs_solve(bad, 0), std::invalid_argument);
}

TEST_CASE("a zero expansion budget reports exhaustion") {
  const auto g = PlanningGraph::open_grid(3, 3);
  const auto inst = make_instance(g, {{0, 1}, {1, 0}}, {{2, 1}, {1, 2}});
  Budget b;
  b.max_expansions = 0;
  CHECK(cbs_solve(inst, 0, b).status == CbsStatus::Exhausted);
}

TEST_CASE("per-agent graph views are respected") {
  // Agent 1 may not use the middle row, so it must go around.
  const auto open = PlanningGraph::open_grid(3, 3);
  const std::vector<std::string> rows{"...", "@@.", "..."};
  MAPFInstance inst;
  inst.graphs = {open, PlanningGraph::from_rows(rows)};
  inst.starts = {{0, 1}, {0, 0}};
  inst.goals = {{2, 1}, {0, 2}};
  const auto want = oracle::joint_optimal_soc(inst.graphs, inst.starts, inst.goals);
  const auto r = cbs_solve(inst, 1);
  REQUIRE(r.status == CbsStatus::Solved);
  CHECK(r.cost == want);
  check_sound(inst, r);
}

TEST_CASE("expanding a vertex conflict gives two vertex-constrained children") {
  const auto g = PlanningGraph::open_grid(3, 3);
  const auto inst = make_instance(g, {{0, 1}, {1, 0}}, {{2, 1}, {1, 2}});
  const CbsSolver solver(inst);
  auto root = solver.root();
  REQUIRE(root);
  REQUIRE(root->conflicts.size() == 1);
  const auto c = root->conflicts.front();
  CHECK(c == Conflict::vertex(0, 1, {1, 1}, 1));
  const auto children = expand_node(*root, c, inst);
  REQUIRE(children.size() == 2);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto& child = children[i];
    REQUIRE(child.added);
    CHECK(child.added->kind == ConstraintKind::Vertex);
    CHECK(child.added->from == Cell{1, 1});
    CHECK(child.added->t == 1);
    CHECK(child.added->agent == static_cast<int>(i));
    CHECK(child.all_constraints().size() == 1);
    CHECK(child.cost == 5);
    CHECK(child.depth == 1);
    // Only the constrained agent was replanned.
    const auto other = 1 - i;
    CHECK(child.solution[other] == root->solution[other]);
  }
  const auto foreign = Conflict::vertex(0, 1, {0, 0}, 7);
  CHECK_THROWS_AS(expand_node(*root, foreign, inst), std::invalid_argument);
}

TEST_CASE("an infeasible side is pruned") {
  // 1x4 corridor. Agent 0 must leave v0 at t=1; blocking v1 at t=1 leaves it no move.
  const auto g = PlanningGraph::open_grid(4, 1);
  const auto inst = make_instance(g, {{0, 0}, {2, 0}}, {{3, 0}, {1, 0}});
  const CbsSolver solver(inst);
  auto root = solver.root();
  REQUIRE(root);
  auto root_ptr = std::make_shared<const CTNode>(*root);
  CTNode node = *root;
  node.parent = root_ptr;
  node.added = Constraint::vertex(0, {0, 0}, 1);
  node.depth = 1;
  const auto conflict = Conflict::vertex(0, 1, {1, 0}, 1);
  REQUIRE(std::find(node.conflicts.begin(), node.conflicts.end(), conflict) != node.conflicts.end());
  const auto children = expand_node(node, conflict, inst);
  REQUIRE(children.size() == 1);
  CHECK(children[0].added == Constraint::vertex(1, {1, 0}, 1));
  CHECK(children[0].cost >= node.cost);
}

TEST_CASE("children never cost less than their parent") {
  std::mt19937_64 rng(31);
  int expanded = 0;
  for (int trial = 0; trial < 200; ++trial) {
    auto [inst, opt] = random_instance(rng, 3);
    if (inst.agents() < 2) continue;
    const CbsSolver solver(inst);
    auto root = solver.root();
    if (!root) continue;
    // Walk a random branch a few levels deep.
    auto node = std::make_shared<const CTNode>(std::move(*root));
    for (int depth = 0; depth < 4 && !node->conflicts.empty(); ++depth) {
      const auto& c = node->conflicts[rng() % node->conflicts.size()];
      auto children = solver.expand(node, c);
      ++expanded;
      for (const auto& child : children) {
        CHECK(child.cost >= node->cost);
        const auto cs = child.constraints_for(child.added->agent);
        const auto& path = *child.solution[static_cast<std::size_t>(child.added->agent)];
        CHECK(path_respects(inst.graphs[static_cast<std::size_t>(child.added->agent)], path, cs));
        int sum = 0;
        for (const auto& p : child.solution) sum += p->cost();
        CHECK(sum == child.cost);
        CHECK(child.conflicts == detect_conflicts(child.paths()));
      }
      if (children.empty()) break;
      node = std::make_shared<const CTNode>(std::move(children[rng() % children.size()]));
    }
  }
  CHECK(expanded > 100);
}

TEST_CASE("sum of costs matches the joint-state oracle") {
  std::mt19937_64 rng(1234);
  int feasible = 0;
  int infeasible = 0;
  for (int trial = 0; trial < 60; ++trial) {
    auto [inst, opt] = random_instance(rng, 3);
    CAPTURE(trial);
    if (!opt) {
      ++infeasible;
      continue;
    }
    const auto r = cbs_solve(inst, static_cast<std::uint64_t>(trial));
    REQUIRE(r.status == CbsStatus::Solved);
    CHECK(r.cost == *opt);
    check_sound(inst, r);
    ++feasible;
  }
  CHECK(feasible >= 40);
  MESSAGE(feasible << " feasible, " << infeasible << " infeasible");
}

TEST_CASE("identical seeds give identical solutions") {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 30; ++trial) {
    auto [inst, opt] = random_instance(rng, 3);
    if (!opt) continue;
    const auto a = cbs_solve(inst, 17);
    const auto b = cbs_solve(inst, 17);
    CHECK(a.status == b.status);
    CHECK(a.paths == b.paths);
    CHECK(a.expansions == b.expansions);
  }
}
