#pragma once

#include <vector>

#include "stlfunnel/stl/formula.hpp"

namespace stlfunnel::stl {

struct Slot {
  AgentId id = 0;
  int offset = 0;
  int dim = 0;
};

// Placement of each agent's state inside the stacked vector.
class StateLayout {
 public:
  StateLayout() = default;
  explicit StateLayout(const std::vector<std::pair<AgentId, int>>& agents);

  const Slot& slot(AgentId id) const;  // throws SelectorOutOfRange
  bool contains(AgentId id) const;
  int size() const { return size_; }
  const std::vector<Slot>& slots() const { return slots_; }

  // Index of component k of agent id; throws SelectorOutOfRange.
  int index(AgentId id, int component) const;
  // Planar position components: the first min(dim, 2).
  int position_dim(AgentId id) const;

  StateLayout subset(const std::vector<AgentId>& ids) const;

 private:
  std::vector<Slot> slots_;
  int size_ = 0;
};

inline constexpr int kHeadingComponent = 2;

}  // namespace stlfunnel::stl
