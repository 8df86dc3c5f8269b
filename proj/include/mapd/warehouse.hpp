#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mapd/grid.hpp"
#include "mapd/rng.hpp"

namespace mapd {

using ItemId = int;

enum class Phase : std::uint8_t { Seeking, Carrying };

struct AgentState {
  int id = 0;
  Cell pos;
  Phase phase = Phase::Seeking;
  // Seeking: the requested item this agent is heading for, if assigned.
  // Carrying: the item being carried.
  std::optional<ItemId> item;
  // Shelf cell the carried item was picked up from.
  std::optional<Cell> pickup_cell;
  std::optional<int> first_delivery_step;
  int pickups = 0;
  int deliveries = 0;
  double cumulative_reward = 0.0;

  bool operator==(const AgentState&) const = default;
};

struct RequestedItem {
  ItemId id = 0;
  Cell shelf;

  bool operator==(const RequestedItem&) const = default;
};

// Carried items stay in the queue until delivered, so its size is constant.
struct RequestQueue {
  std::vector<RequestedItem> items;
  int capacity = 0;
  ItemId next_id = 0;

  const RequestedItem* find(ItemId id) const;
  const RequestedItem* at_shelf(Cell c) const;

  bool operator==(const RequestQueue&) const = default;
};

struct WorldState {
  std::shared_ptr<const WarehouseMap> map;
  std::vector<AgentState> agents;
  RequestQueue queue;
  int step = 0;
  Rng rng;

  const AgentState& agent(int id) const;
  std::optional<int> agent_at(Cell c) const;

  friend bool operator==(const WorldState& a, const WorldState& b) {
    return *a.map == *b.map && a.agents == b.agents && a.queue == b.queue &&
           a.step == b.step && a.rng == b.rng;
  }
};

enum class EventKind : std::uint8_t { Pickup, Delivery, Spawn };

const char* to_string(EventKind k);

struct Event {
  EventKind kind = EventKind::Pickup;
  int agent = -1;  // -1 for spawns
  ItemId item = 0;
  Cell cell;
  int step = 0;  // step index after the move
  double reward = 0.0;

  bool operator==(const Event&) const = default;
};

enum class ContractKind : std::uint8_t { InvalidAgent, Arity, IllegalMove, VertexCollision, EdgeSwap };

// A caller broke a precondition of the environment (illegal move or collision).
class ContractError : public std::logic_error {
 public:
  ContractError(ContractKind kind, std::vector<int> agents, std::vector<Cell> cells,
                const std::string& what)
      : std::logic_error(what), kind_(kind), agents_(std::move(agents)), cells_(std::move(cells)) {}

  ContractKind kind() const { return kind_; }
  const std::vector<int>& agents() const { return agents_; }
  const std::vector<Cell>& cells() const { return cells_; }

 private:
  ContractKind kind_;
  std::vector<int> agents_;
  std::vector<Cell> cells_;
};

inline constexpr double kPickupReward = 1.0;
inline constexpr double kDeliveryReward = 2.0;

// Agents on distinct Corridor cells and n requested items on distinct Shelf
// cells, all drawn from a generator seeded with `seed`.
WorldState init_episode(std::shared_ptr<const WarehouseMap> map, int n_agents, std::uint64_t seed);
WorldState init_episode(const WarehouseMap& map, int n_agents, std::uint64_t seed);

// Wait plus every in-bounds direction passable for the agent's phase. Seeking
// agents may enter shelf cells, carrying agents may not. Other agents are ignored.
std::vector<Move> legal_moves(const WorldState& state, int agent_id);

// Points a Seeking agent at a requested item. The item must be in the queue and
// not carried or targeted by another agent.
void set_target_item(WorldState& state, int agent_id, ItemId item);

// Applies one joint step atomically. Throws ContractError on illegal moves,
// vertex collisions, or edge swaps.
std::pair<WorldState, std::vector<Event>> apply_joint_moves(const WorldState& state,
                                                           const std::vector<Move>& moves);

// In-place variant used by the simulation loop.
std::vector<Event> apply_joint_moves_inplace(WorldState& state, const std::vector<Move>& moves);

// Human-readable descriptions of every violated state invariant; empty when the
// state is consistent.
std::vector<std::string> check_invariants(const WorldState& state);

}  // namespace mapd
