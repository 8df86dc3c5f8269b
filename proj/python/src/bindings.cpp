#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "mapd/bench.hpp"
#include "mapd/cbs.hpp"
#include "mapd/lifelong.hpp"
#include "mapd/mapf.hpp"
#include "mapd/warehouse.hpp"

namespace py = pybind11;
using namespace mapd;

namespace {

using XY = std::pair<int, int>;

Cell to_cell(const XY& p) { return {p.first, p.second}; }
XY to_xy(Cell c) { return {c.x, c.y}; }

std::vector<XY> to_xy(const std::vector<Cell>& cells) {
  std::vector<XY> out;
  out.reserve(cells.size());
  for (Cell c : cells) out.push_back(to_xy(c));
  return out;
}

Budget make_budget(std::int64_t max_expansions, double timeout) {
  Budget b;
  b.max_expansions = max_expansions;
  b.wall_time_limit = timeout;
  return b;
}

Move parse_move(const std::string& s) {
  for (Move m : kAllMoves) {
    if (s == to_string(m)) return m;
  }
  throw py::value_error("unknown move '" + s + "'; expected wait, up, down, left or right");
}

py::dict event_dict(const Event& e) {
  py::dict d;
  d["kind"] = to_string(e.kind);
  d["agent"] = e.agent;
  d["item"] = e.item;
  d["cell"] = to_xy(e.cell);
  d["step"] = e.step;
  d["reward"] = e.reward;
  return d;
}

py::dict metrics_dict(const EpisodeMetrics& m) {
  py::dict d;
  d["flowtime"] = m.flowtime;
  d["makespan"] = m.makespan;
  d["mean_reward"] = m.mean_reward;
  d["mean_delivered"] = m.mean_delivered;
  d["wall_secs"] = m.wall_secs;
  d["replans"] = m.replans;
  d["replan_failures"] = m.replan_failures;
  d["truncated"] = m.truncated;
  d["replan_wall_secs"] = m.replan_wall_secs;
  d["sim_steps"] = m.sim_steps;
  d["degraded"] = m.degraded;
  return d;
}

// A warehouse episode driven from Python, move by move.
class Env {
 public:
  Env(const WarehouseMap& map, int agents, std::uint64_t seed) : world_(init_episode(map, agents, seed)) {}

  int step_index() const { return world_.step; }
  std::vector<XY> positions() const {
    std::vector<XY> out;
    for (const auto& a : world_.agents) out.push_back(to_xy(a.pos));
    return out;
  }
  std::vector<std::string> phases() const {
    std::vector<std::string> out;
    for (const auto& a : world_.agents) out.push_back(a.phase == Phase::Seeking ? "seeking" : "carrying");
    return out;
  }
  std::vector<double> rewards() const {
    std::vector<double> out;
    for (const auto& a : world_.agents) out.push_back(a.cumulative_reward);
    return out;
  }
  std::vector<std::pair<int, XY>> items() const {
    std::vector<std::pair<int, XY>> out;
    for (const auto& it : world_.queue.items) out.emplace_back(it.id, to_xy(it.shelf));
    return out;
  }
  std::vector<std::string> legal(int agent) const {
    std::vector<std::string> out;
    for (Move m : legal_moves(world_, agent)) out.emplace_back(to_string(m));
    return out;
  }
  void target(int agent, int item) { set_target_item(world_, agent, item); }
  py::list step(const std::vector<std::string>& moves) {
    std::vector<Move> parsed;
    for (const auto& s : moves) parsed.push_back(parse_move(s));
    py::list out;
    for (const auto& e : apply_joint_moves_inplace(world_, parsed)) out.append(event_dict(e));
    return out;
  }
  std::vector<std::string> invariants() const { return check_invariants(world_); }

 private:
  WorldState world_;
};

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Lifelong multi-agent pickup and delivery with conflict-based search";

  py::register_exception<MapError>(m, "MapError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_RuntimeError);
  py::register_exception<PlanningError>(m, "PlanningError", PyExc_ValueError);

  py::class_<WarehouseMap>(m, "WarehouseMap")
      .def_property_readonly("width", &WarehouseMap::width)
      .def_property_readonly("height", &WarehouseMap::height)
      .def_property_readonly("name", &WarehouseMap::name)
      .def("shelves", [](const WarehouseMap& w) { return to_xy(w.cells_of(CellKind::Shelf)); })
      .def("deliveries", [](const WarehouseMap& w) { return to_xy(w.cells_of(CellKind::Delivery)); })
      .def("corridors", [](const WarehouseMap& w) { return to_xy(w.cells_of(CellKind::Corridor)); })
      .def("serialize", &serialize_map)
      .def("__eq__", [](const WarehouseMap& a, const WarehouseMap& b) { return a == b; })
      .def("__repr__", [](const WarehouseMap& w) {
        return "<WarehouseMap " + w.name() + " " + std::to_string(w.width()) + "x" + std::to_string(w.height()) + ">";
      });

  m.def("load_map", &load_map, py::arg("text"), py::arg("name") = "custom", "Parse map text.");
  m.def("builtin_map", &builtin_map, py::arg("name"), "One of the shipped maps: small, medium, large.");
  m.def("resolve_map", &resolve_map, py::arg("name_or_path"));

  py::class_<Env>(m, "Env")
      .def(py::init<const WarehouseMap&, int, std::uint64_t>(), py::arg("map"), py::arg("agents"), py::arg("seed"))
      .def_property_readonly("step_index", &Env::step_index)
      .def_property_readonly("positions", &Env::positions)
      .def_property_readonly("phases", &Env::phases)
      .def_property_readonly("rewards", &Env::rewards)
      .def_property_readonly("items", &Env::items)
      .def("legal_moves", &Env::legal, py::arg("agent"))
      .def("set_target", &Env::target, py::arg("agent"), py::arg("item"))
      .def("step", &Env::step, py::arg("moves"), "Apply one joint move; returns the events.")
      .def("check_invariants", &Env::invariants);

  m.def(
      "space_time_search",
      [](const std::vector<std::string>& rows, XY start, XY goal, const std::vector<std::pair<std::string, py::tuple>>& constraints,
         std::optional<int> horizon) -> std::optional<std::vector<XY>> {
        const auto g = PlanningGraph::from_rows(rows);
        std::vector<Constraint> cs;
        for (const auto& [kind, args] : constraints) {
          if (kind == "vertex") {
            cs.push_back(Constraint::vertex(0, to_cell(args[0].cast<XY>()), args[1].cast<int>()));
          } else if (kind == "edge") {
            cs.push_back(Constraint::edge(0, to_cell(args[0].cast<XY>()), to_cell(args[1].cast<XY>()), args[2].cast<int>()));
          } else {
            throw py::value_error("constraint kind must be 'vertex' or 'edge'");
          }
        }
        const auto p = space_time_search(g, to_cell(start), to_cell(goal), cs, horizon.value_or(default_horizon(g, cs)));
        if (!p) return std::nullopt;
        return to_xy(p->vertices);
      },
      py::arg("rows"), py::arg("start"), py::arg("goal"), py::arg("constraints") = std::vector<std::pair<std::string, py::tuple>>{},
      py::arg("horizon") = py::none(),
      "Shortest constrained path on a grid given as rows of '.' and '@'. Constraints are "
      "('vertex', ((x, y), t)) or ('edge', ((x1, y1), (x2, y2), t)). Returns None if infeasible.");

  m.def(
      "cbs_solve",
      [](const std::vector<std::string>& rows, const std::vector<XY>& starts, const std::vector<XY>& goals,
         std::uint64_t seed, std::int64_t max_expansions, double timeout) {
        std::vector<Cell> s;
        std::vector<Cell> g;
        for (auto p : starts) s.push_back(to_cell(p));
        for (auto p : goals) g.push_back(to_cell(p));
        const auto inst = make_instance(PlanningGraph::from_rows(rows), s, g);
        CbsResult r;
        {
          py::gil_scoped_release release;
          r = cbs_solve(inst, seed, make_budget(max_expansions, timeout));
        }
        py::dict d;
        d["status"] = to_string(r.status);
        d["cost"] = r.cost;
        d["expansions"] = r.expansions;
        d["seconds"] = r.seconds;
        py::list paths;
        for (const auto& p : r.paths) paths.append(to_xy(p.vertices));
        d["paths"] = paths;
        return d;
      },
      py::arg("rows"), py::arg("starts"), py::arg("goals"), py::arg("seed") = 0,
      py::arg("max_expansions") = Budget{}.max_expansions, py::arg("timeout") = Budget{}.wall_time_limit,
      "Conflict-based search on a grid given as rows of '.' and '@'.");

  m.def(
      "detect_conflicts",
      [](const std::vector<std::vector<XY>>& paths) {
        std::vector<Path> ps;
        for (std::size_t i = 0; i < paths.size(); ++i) {
          Path p;
          p.agent = static_cast<int>(i);
          for (auto c : paths[i]) p.vertices.push_back(to_cell(c));
          if (p.vertices.empty()) throw py::value_error("empty path");
          ps.push_back(std::move(p));
        }
        py::list out;
        for (const auto& c : detect_conflicts(ps)) {
          py::dict d;
          d["kind"] = c.kind == ConflictKind::Vertex ? "vertex" : "edge";
          d["agents"] = std::make_pair(c.a1, c.a2);
          d["cells"] = std::make_pair(to_xy(c.v1), to_xy(c.v2));
          d["t"] = c.t;
          out.append(d);
        }
        return out;
      },
      py::arg("paths"));

  m.def(
      "run_episode",
      [](const std::string& map, int agents, std::uint64_t seed, int episode, int steps, std::int64_t max_expansions,
         double timeout, bool trace) {
        BenchConfig cfg;
        cfg.map = map;
        cfg.agents = agents;
        cfg.horizon = steps;
        cfg.budget = make_budget(max_expansions, timeout);
        std::vector<TraceRecord> records;
        EpisodeMetrics metrics;
        {
          py::gil_scoped_release release;
          metrics = run_episode(cfg, seed, episode, trace ? &records : nullptr);
        }
        py::dict d = metrics_dict(metrics);
        if (trace) {
          py::list lines;
          for (const auto& r : records) lines.append(to_json_line(r));
          d["trace"] = lines;
        }
        return d;
      },
      py::arg("map") = "small", py::arg("agents") = 2, py::arg("seed") = 0, py::arg("episode") = 0,
      py::arg("steps") = 500, py::arg("max_expansions") = Budget{}.max_expansions,
      py::arg("timeout") = Budget{}.wall_time_limit, py::arg("trace") = false,
      "Run one lifelong episode. With trace=True the result has a 'trace' list of JSON lines.");

  m.def(
      "bench",
      [](const std::vector<std::string>& maps, const std::vector<int>& agents, const std::vector<std::uint64_t>& seeds,
         int episodes, int steps, std::int64_t max_expansions, double timeout) {
        SuiteConfig cfg;
        cfg.maps = maps;
        cfg.agent_counts = agents;
        cfg.seeds = seeds;
        cfg.episodes = episodes;
        cfg.horizon = steps;
        cfg.budget = make_budget(max_expansions, timeout);
        py::gil_scoped_release release;
        return to_csv(run_suite(cfg).rows);
      },
      py::arg("maps") = std::vector<std::string>{"small", "medium", "large"},
      py::arg("agents") = std::vector<int>{2, 5, 8}, py::arg("seeds") = std::vector<std::uint64_t>{0, 1, 2, 3, 4},
      py::arg("episodes") = 4, py::arg("steps") = 500, py::arg("max_expansions") = Budget{}.max_expansions,
      py::arg("timeout") = Budget{}.wall_time_limit, "Run the benchmark matrix and return the CSV text.");

  m.def(
      "render_ascii",
      [](const WarehouseMap& map, const std::string& trace_line) {
        return render_ascii(map, parse_trace_line(trace_line));
      },
      py::arg("map"), py::arg("trace_line"), "Render one trace record as text.");

  m.attr("CSV_HEADER") = kCsvHeader;
}
