#include "mapd/warehouse.hpp"

#include <algorithm>
#include <unordered_map>

namespace mapd {

const RequestedItem* RequestQueue::find(ItemId id) const {
  for (const auto& it : items) {
    if (it.id == id) return &it;
  }
  return nullptr;
}

const RequestedItem* RequestQueue::at_shelf(Cell c) const {
  for (const auto& it : items) {
    if (it.shelf == c) return &it;
  }
  return nullptr;
}

const AgentState& WorldState::agent(int id) const {
  if (id < 0 || id >= static_cast<int>(agents.size())) {
    throw ContractError(ContractKind::InvalidAgent, {id}, {},
                        "invalid agent id " + std::to_string(id));
  }
  return agents[static_cast<std::size_t>(id)];
}

std::optional<int> WorldState::agent_at(Cell c) const {
  for (const auto& a : agents) {
    if (a.pos == c) return a.id;
  }
  return std::nullopt;
}

const char* to_string(EventKind k) {
  switch (k) {
    case EventKind::Pickup: return "pickup";
    case EventKind::Delivery: return "delivery";
    case EventKind::Spawn: return "spawn";
  }
  return "?";
}

namespace {

// Partial Fisher-Yates: k distinct elements of `pool`, in draw order.
std::vector<Cell> sample_without_replacement(std::vector<Cell> pool, std::size_t k, Rng& rng) {
  for (std::size_t i = 0; i < k; ++i) {
    const auto j = i + uniform_index(rng, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  return pool;
}

bool item_claimed(const WorldState& state, ItemId id, int except_agent) {
  for (const auto& a : state.agents) {
    if (a.id != except_agent && a.item == id) return true;
  }
  return false;
}

void spawn_item(WorldState& state, std::vector<Event>& events) {
  std::vector<Cell> eligible;
  for (Cell s : state.map->cells_of(CellKind::Shelf)) {
    if (state.queue.at_shelf(s) == nullptr && !state.agent_at(s)) eligible.push_back(s);
  }
  if (eligible.empty()) {
    throw std::runtime_error("no free shelf cell to spawn a requested item on");
  }
  const Cell c = eligible[uniform_index(state.rng, eligible.size())];
  const ItemId id = state.queue.next_id++;
  state.queue.items.push_back({id, c});
  events.push_back({EventKind::Spawn, -1, id, c, state.step, 0.0});
}

}  // namespace

WorldState init_episode(std::shared_ptr<const WarehouseMap> map, int n_agents,
                        std::uint64_t seed) {
  if (!map) throw std::invalid_argument("init_episode: null map");
  if (n_agents < 1) throw std::invalid_argument("init_episode: need at least one agent");
  auto corridors = map->cells_of(CellKind::Corridor);
  auto shelves = map->cells_of(CellKind::Shelf);
  if (static_cast<int>(corridors.size()) < n_agents) {
    throw std::invalid_argument("init_episode: map has " + std::to_string(corridors.size()) +
                                " corridor cells for " + std::to_string(n_agents) + " agents");
  }
  if (static_cast<int>(shelves.size()) < n_agents) {
    throw std::invalid_argument("init_episode: map has " + std::to_string(shelves.size()) +
                                " shelf cells for " + std::to_string(n_agents) + " requested items");
  }

  WorldState s;
  s.map = std::move(map);
  s.rng.seed(seed);
  const auto n = static_cast<std::size_t>(n_agents);
  const auto starts = sample_without_replacement(std::move(corridors), n, s.rng);
  for (int i = 0; i < n_agents; ++i) {
    AgentState a;
    a.id = i;
    a.pos = starts[static_cast<std::size_t>(i)];
    s.agents.push_back(a);
  }
  const auto shelf_cells = sample_without_replacement(std::move(shelves), n, s.rng);
  s.queue.capacity = n_agents;
  for (Cell c : shelf_cells) s.queue.items.push_back({s.queue.next_id++, c});
  return s;
}

WorldState init_episode(const WarehouseMap& map, int n_agents, std::uint64_t seed) {
  return init_episode(std::make_shared<const WarehouseMap>(map), n_agents, seed);
}

std::vector<Move> legal_moves(const WorldState& state, int agent_id) {
  const AgentState& a = state.agent(agent_id);
  const WarehouseMap& map = *state.map;
  std::vector<Move> out{Move::Wait};
  for (Move m : kAllMoves) {
    if (m == Move::Wait) continue;
    const Cell t = apply_move(a.pos, m);
    if (!map.in_bounds(t)) continue;
    if (a.phase == Phase::Carrying && map.kind(t) == CellKind::Shelf) continue;
    out.push_back(m);
  }
  return out;
}

void set_target_item(WorldState& state, int agent_id, ItemId item) {
  const AgentState& a = state.agent(agent_id);
  if (a.phase != Phase::Seeking) {
    throw ContractError(ContractKind::IllegalMove, {agent_id}, {a.pos},
                        "agent " + std::to_string(agent_id) + " is carrying and cannot take a new item");
  }
  if (state.queue.find(item) == nullptr) {
    throw std::invalid_argument("item " + std::to_string(item) + " is not requested");
  }
  if (item_claimed(state, item, agent_id)) {
    throw std::invalid_argument("item " + std::to_string(item) + " is already claimed");
  }
  state.agents[static_cast<std::size_t>(agent_id)].item = item;
}

std::vector<Event> apply_joint_moves_inplace(WorldState& state, const std::vector<Move>& moves) {
  const auto n = state.agents.size();
  if (moves.size() != n) {
    throw ContractError(ContractKind::Arity, {}, {},
                        "expected " + std::to_string(n) + " moves, got " + std::to_string(moves.size()));
  }
  const WarehouseMap& map = *state.map;

  std::vector<Cell> next(n);
  for (std::size_t i = 0; i < n; ++i) {
    const AgentState& a = state.agents[i];
    const Cell t = apply_move(a.pos, moves[i]);
    const bool ok = map.in_bounds(t) &&
                    (moves[i] == Move::Wait || a.phase == Phase::Seeking ||
                     map.kind(t) != CellKind::Shelf);
    if (!ok) {
      throw ContractError(ContractKind::IllegalMove, {a.id}, {a.pos, t},
                          "agent " + std::to_string(a.id) + " cannot move " + to_string(moves[i]) +
                              " from " + to_string(a.pos));
    }
    next[i] = t;
  }

  std::unordered_map<Cell, std::size_t> occupant;
  for (std::size_t i = 0; i < n; ++i) {
    auto [it, inserted] = occupant.emplace(next[i], i);
    if (!inserted) {
      const int a = state.agents[it->second].id;
      const int b = state.agents[i].id;
      throw ContractError(ContractKind::VertexCollision, {a, b}, {next[i]},
                          "agents " + std::to_string(a) + " and " + std::to_string(b) +
                              " collide at " + to_string(next[i]));
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Cell from = state.agents[i].pos;
    if (from == next[i]) continue;
    const auto it = occupant.find(from);
    if (it == occupant.end() || it->second == i) continue;
    const std::size_t j = it->second;
    if (state.agents[j].pos == next[i] && i < j) {
      const int a = state.agents[i].id;
      const int b = state.agents[j].id;
      throw ContractError(ContractKind::EdgeSwap, {a, b}, {from, next[i]},
                          "agents " + std::to_string(a) + " and " + std::to_string(b) +
                              " swap across " + to_string(from) + "-" + to_string(next[i]));
    }
  }

  ++state.step;
  std::vector<Event> events;
  for (std::size_t i = 0; i < n; ++i) state.agents[i].pos = next[i];

  for (auto& a : state.agents) {
    if (a.phase == Phase::Seeking && a.item) {
      const RequestedItem* it = state.queue.find(*a.item);
      if (it != nullptr && it->shelf == a.pos) {
        a.phase = Phase::Carrying;
        a.pickup_cell = a.pos;
        ++a.pickups;
        a.cumulative_reward += kPickupReward;
        events.push_back({EventKind::Pickup, a.id, *a.item, a.pos, state.step, kPickupReward});
      }
    } else if (a.phase == Phase::Carrying && map.kind(a.pos) == CellKind::Delivery) {
      const ItemId delivered = a.item.value();
      a.phase = Phase::Seeking;
      a.item.reset();
      a.pickup_cell.reset();
      ++a.deliveries;
      a.cumulative_reward += kDeliveryReward;
      if (!a.first_delivery_step) a.first_delivery_step = state.step;
      events.push_back({EventKind::Delivery, a.id, delivered, a.pos, state.step, kDeliveryReward});
      std::erase_if(state.queue.items, [&](const RequestedItem& r) { return r.id == delivered; });
      spawn_item(state, events);
    }
  }
  return events;
}

std::pair<WorldState, std::vector<Event>> apply_joint_moves(const WorldState& state,
                                                           const std::vector<Move>& moves) {
  WorldState next = state;
  auto events = apply_joint_moves_inplace(next, moves);
  return {std::move(next), std::move(events)};
}

std::vector<std::string> check_invariants(const WorldState& state) {
  std::vector<std::string> bad;
  const WarehouseMap& map = *state.map;
  const auto& q = state.queue;
  const auto n = static_cast<int>(state.agents.size());

  if (static_cast<int>(q.items.size()) != q.capacity || q.capacity != n) {
    bad.push_back("queue holds " + std::to_string(q.items.size()) + " items, capacity " +
                  std::to_string(q.capacity) + ", agents " + std::to_string(n));
  }
  for (std::size_t i = 0; i < q.items.size(); ++i) {
    const auto& it = q.items[i];
    if (!map.in_bounds(it.shelf) || map.kind(it.shelf) != CellKind::Shelf) {
      bad.push_back("item " + std::to_string(it.id) + " is not on a shelf cell");
    }
    for (std::size_t j = i + 1; j < q.items.size(); ++j) {
      if (q.items[j].shelf == it.shelf) {
        bad.push_back("items " + std::to_string(it.id) + " and " + std::to_string(q.items[j].id) +
                      " share shelf " + to_string(it.shelf));
      }
      if (q.items[j].id == it.id) bad.push_back("duplicate item id " + std::to_string(it.id));
    }
  }

  for (int i = 0; i < n; ++i) {
    const auto& a = state.agents[static_cast<std::size_t>(i)];
    const std::string who = "agent " + std::to_string(a.id);
    if (a.id != i) bad.push_back(who + " stored at index " + std::to_string(i));
    if (!map.in_bounds(a.pos)) bad.push_back(who + " is out of bounds");
    for (int j = i + 1; j < n; ++j) {
      if (state.agents[static_cast<std::size_t>(j)].pos == a.pos) {
        bad.push_back(who + " shares " + to_string(a.pos) + " with agent " + std::to_string(j));
      }
    }
    if (a.cumulative_reward != kPickupReward * a.pickups + kDeliveryReward * a.deliveries) {
      bad.push_back(who + " reward does not equal pickups + 2*deliveries");
    }
    if (a.deliveries > 0 && !a.first_delivery_step) bad.push_back(who + " delivered without a first delivery step");
    if (a.phase == Phase::Carrying) {
      if (!a.item || q.find(*a.item) == nullptr) bad.push_back(who + " carries an unrequested item");
      // Only the shelf the item was lifted from may hold a carrying agent.
      if (map.in_bounds(a.pos) && map.kind(a.pos) == CellKind::Shelf && a.pickup_cell != a.pos) {
        bad.push_back(who + " is carrying on shelf " + to_string(a.pos));
      }
    } else if (a.item && q.find(*a.item) == nullptr) {
      bad.push_back(who + " targets an unrequested item");
    }
    if (a.item) {
      for (int j = i + 1; j < n; ++j) {
        if (state.agents[static_cast<std::size_t>(j)].item == a.item) {
          bad.push_back(who + " and agent " + std::to_string(j) + " claim the same item");
        }
      }
    }
  }
  if (state.step < 0) bad.push_back("negative step");
  return bad;
}

}  // namespace mapd
