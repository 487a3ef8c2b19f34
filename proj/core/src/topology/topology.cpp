#include "stlfunnel/topology/topology.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "stlfunnel/error.hpp"
#include "stlfunnel/stl/robustness.hpp"

namespace stlfunnel::topology {

namespace {

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t a) {
    while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
    return a;
  }
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent_[std::max(a, b)] = std::min(a, b);
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

CommGraph::CommGraph(std::vector<std::pair<AgentId, AgentId>> edges) {
  for (const auto& [a, b] : edges) {
    if (a == b) throw Error(ErrorCode::Validation, "self-loop on agent " + std::to_string(a));
  }
  edges_ = std::move(edges);
}

const std::vector<std::pair<AgentId, AgentId>>& CommGraph::edges() const {
  static const std::vector<std::pair<AgentId, AgentId>> none;
  return edges_ ? *edges_ : none;
}

bool CommGraph::connected(const std::vector<AgentId>& among) const {
  if (complete() || among.size() < 2) return true;
  auto pos = [&](AgentId id) -> std::optional<std::size_t> {
    auto it = std::find(among.begin(), among.end(), id);
    if (it == among.end()) return std::nullopt;
    return static_cast<std::size_t>(it - among.begin());
  };
  UnionFind uf(among.size());
  for (const auto& [a, b] : *edges_) {
    auto pa = pos(a);
    auto pb = pos(b);
    if (pa && pb) uf.unite(*pa, *pb);
  }
  for (std::size_t k = 1; k < among.size(); ++k) {
    if (uf.find(k) != uf.find(0)) return false;
  }
  return true;
}

int ClusterPartition::cluster_of(AgentId id) const {
  for (std::size_t c = 0; c < clusters.size(); ++c) {
    const auto& a = clusters[c].agents;
    if (std::find(a.begin(), a.end(), id) != a.end()) return static_cast<int>(c);
  }
  return -1;
}

ClusterPartition clusters(const std::map<AgentId, stl::TaskFormula>& tasks, const CommGraph& comm) {
  std::vector<AgentId> ids;
  for (const auto& [id, task] : tasks) ids.push_back(id);
  auto index_of = [&](AgentId id) -> std::size_t {
    auto it = std::lower_bound(ids.begin(), ids.end(), id);
    if (it == ids.end() || *it != id) {
      throw Error(ErrorCode::Validation, "task references unknown agent " + std::to_string(id));
    }
    return static_cast<std::size_t>(it - ids.begin());
  };

  UnionFind uf(ids.size());
  for (const auto& [id, task] : tasks) {
    for (AgentId j : stl::participants(task, id)) uf.unite(index_of(id), index_of(j));
  }

  std::map<std::size_t, Cluster> by_root;
  for (std::size_t k = 0; k < ids.size(); ++k) by_root[uf.find(k)].agents.push_back(ids[k]);

  ClusterPartition out;
  for (auto& [root, c] : by_root) {
    const auto& first = tasks.at(c.agents.front());
    c.case_a = std::all_of(c.agents.begin(), c.agents.end(), [&](AgentId id) { return tasks.at(id) == first; });
    c.comm_ok = comm.connected(c.agents);
    out.clusters.push_back(std::move(c));
  }
  std::sort(out.clusters.begin(), out.clusters.end(),
            [](const Cluster& a, const Cluster& b) { return a.agents.front() < b.agents.front(); });
  return out;
}

bool stage2_timing_ok(AgentId i, const stl::PhiFormula& unit, const std::map<AgentId, AgentStatus>& status) {
  for (AgentId j : stl::participants(unit, i)) {
    if (j == i) continue;
    auto it = status.find(j);
    if (it == status.end()) return false;
    const AgentStatus& s = it->second;
    if (s.collab == -1) continue;
    if (s.collab == 0 && s.active) {
      double deadline = s.active->op == stl::TemporalOp::Eventually ? s.active->b : s.active->a;
      if (unit.b < deadline) continue;
    }
    return false;
  }
  return true;
}

}  // namespace stlfunnel::topology
