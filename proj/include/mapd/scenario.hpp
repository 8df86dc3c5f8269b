#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "mapd/cbs.hpp"
#include "mapd/grid.hpp"

namespace mapd {

// Single-shot instance for the `solve` debug command. Each non-comment line is
// "<agent> <start_x> <start_y> <goal_x> <goal_y>"; agents keep file order.
struct ScenarioAgent {
  int label = 0;
  Cell start;
  Cell goal;
};

std::vector<ScenarioAgent> parse_scenario(std::string_view text);
std::vector<ScenarioAgent> load_scenario_file(const std::string& path);

// Each agent plans on the corridor and delivery cells plus its own start and
// goal cells.
MAPFInstance scenario_instance(const WarehouseMap& map, const std::vector<ScenarioAgent>& agents);

}  // namespace mapd
