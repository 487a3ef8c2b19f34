#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "stlfunnel/stl/formula.hpp"

namespace stlfunnel::topology {

using stl::AgentId;

// Undirected communication graph; no edge list means complete.
class CommGraph {
 public:
  CommGraph() = default;
  explicit CommGraph(std::vector<std::pair<AgentId, AgentId>> edges);

  bool complete() const { return !edges_; }
  // Path-connected within the graph restricted to `among`.
  bool connected(const std::vector<AgentId>& among) const;
  const std::vector<std::pair<AgentId, AgentId>>& edges() const;

 private:
  std::optional<std::vector<std::pair<AgentId, AgentId>>> edges_;
};

struct Cluster {
  std::vector<AgentId> agents;
  bool case_a = true;   // all tasks structurally identical
  bool comm_ok = true;  // all members can reach each other
};

struct ClusterPartition {
  std::vector<Cluster> clusters;  // ordered by smallest member
  int cluster_of(AgentId id) const;
};

ClusterPartition clusters(const std::map<AgentId, stl::TaskFormula>& tasks, const CommGraph& comm = {});

struct AgentStatus {
  int collab = 0;
  const stl::PhiFormula* active = nullptr;  // current unit, null when free
};

// True iff each other participant of `unit` is free, or pursues its own
// unit whose deadline (b for F, a for G) is later than unit.b.
bool stage2_timing_ok(AgentId i, const stl::PhiFormula& unit, const std::map<AgentId, AgentStatus>& status);

}  // namespace stlfunnel::topology
