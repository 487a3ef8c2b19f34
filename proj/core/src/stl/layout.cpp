#include "stlfunnel/stl/layout.hpp"

#include <algorithm>
#include <string>

#include "stlfunnel/error.hpp"

namespace stlfunnel::stl {

StateLayout::StateLayout(const std::vector<std::pair<AgentId, int>>& agents) {
  for (const auto& [id, dim] : agents) {
    if (contains(id)) throw Error(ErrorCode::Validation, "duplicate agent id " + std::to_string(id));
    if (dim <= 0) throw Error(ErrorCode::DimensionMismatch, "agent " + std::to_string(id) + " has no state");
    slots_.push_back({id, size_, dim});
    size_ += dim;
  }
}

bool StateLayout::contains(AgentId id) const {
  return std::any_of(slots_.begin(), slots_.end(), [id](const Slot& s) { return s.id == id; });
}

const Slot& StateLayout::slot(AgentId id) const {
  for (const auto& s : slots_) {
    if (s.id == id) return s;
  }
  throw Error(ErrorCode::SelectorOutOfRange, "agent " + std::to_string(id) + " is not in the state");
}

int StateLayout::index(AgentId id, int component) const {
  const Slot& s = slot(id);
  if (component < 0 || component >= s.dim) {
    throw Error(ErrorCode::SelectorOutOfRange, "agent " + std::to_string(id) + " has no component " +
                                                   std::to_string(component + 1));
  }
  return s.offset + component;
}

int StateLayout::position_dim(AgentId id) const { return std::min(slot(id).dim, 2); }

StateLayout StateLayout::subset(const std::vector<AgentId>& ids) const {
  std::vector<std::pair<AgentId, int>> picked;
  for (AgentId id : ids) picked.emplace_back(id, slot(id).dim);
  return StateLayout(picked);
}

}  // namespace stlfunnel::stl
