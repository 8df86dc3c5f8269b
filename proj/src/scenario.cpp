#include "mapd/scenario.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace mapd {

std::vector<ScenarioAgent> parse_scenario(std::string_view text) {
  std::vector<ScenarioAgent> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    std::istringstream ls(line);
    ScenarioAgent a;
    std::string rest;
    if (!(ls >> a.label >> a.start.x >> a.start.y >> a.goal.x >> a.goal.y) || (ls >> rest)) {
      throw std::invalid_argument("scenario line " + std::to_string(lineno) +
                                  ": expected '<agent> <start_x> <start_y> <goal_x> <goal_y>'");
    }
    out.push_back(a);
  }
  if (out.empty()) throw std::invalid_argument("scenario has no agents");
  return out;
}

std::vector<ScenarioAgent> load_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open scenario file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_scenario(ss.str());
}

MAPFInstance scenario_instance(const WarehouseMap& map, const std::vector<ScenarioAgent>& agents) {
  std::vector<std::uint8_t> open(static_cast<std::size_t>(map.area()), 0);
  for (int i = 0; i < map.area(); ++i) open[static_cast<std::size_t>(i)] = map.is_open(map.cell(i)) ? 1 : 0;
  MAPFInstance inst;
  for (const auto& a : agents) {
    if (!map.in_bounds(a.start) || !map.in_bounds(a.goal)) {
      throw std::invalid_argument("agent " + std::to_string(a.label) + " start or goal is outside the map");
    }
    auto mask = open;
    mask[static_cast<std::size_t>(map.index(a.start))] = 1;
    mask[static_cast<std::size_t>(map.index(a.goal))] = 1;
    inst.graphs.emplace_back(map.width(), map.height(), std::move(mask));
    inst.starts.push_back(a.start);
    inst.goals.push_back(a.goal);
  }
  inst.validate();
  return inst;
}

}  // namespace mapd
