#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "stlfunnel/config.hpp"
#include "stlfunnel/error.hpp"
#include "stlfunnel/funnel/funnel.hpp"
#include "stlfunnel/stl/optimize.hpp"
#include "stlfunnel/stl/robustness.hpp"

namespace stlfunnel::hybrid {

using stl::AgentId;

inline constexpr int kFree = -1;
inline constexpr int kOwnTask = 0;

struct RepairState {
  int n_repairs = 0;
  int collab = kOwnTask;  // -1 free, 0 own task, k > 0 working on agent k's task
  std::size_t collab_unit = 0;  // unit of agent `collab` being helped
  bool operator==(const RepairState&) const = default;
};

// The agent's state vector lives in the stacked world state; jumps never touch it.
struct HybridState {
  AgentId id = 0;
  double clock = 0.0;
  funnel::FunnelParams funnel;
  RepairState repair;
  std::size_t unit_index = 0;
  bool operator==(const HybridState&) const = default;
};

// A task lowered onto the team layout, with per-unit data cached.
struct AgentTask {
  AgentId id = 0;
  stl::TaskFormula task;
  std::vector<stl::CompiledPsi> psi;
  std::vector<double> rho_opt;
  std::vector<std::vector<AgentId>> participants;
};

// Throws NonFinite when a unit is unbounded.
AgentTask prepare_task(AgentId id, const stl::TaskFormula& task, const stl::StateLayout& layout,
                       const stl::OptimizeOptions& opt = {});

enum class JumpType { Stage1, Stage2Initiate, Stage2Join, Stage3, Satisfied };

struct JumpKind {
  JumpType type = JumpType::Stage1;
  AgentId initiator = 0;    // Stage2Join
  Side side = Side::Lower;  // Stage1, Stage2Initiate, Stage3
  bool operator==(const JumpKind&) const = default;
};

std::string to_string(const JumpKind& kind);
const char* to_string(JumpType type);

struct Team {
  const stl::StateLayout* layout = nullptr;
  std::vector<AgentTask> tasks;     // ascending agent id
  std::vector<HybridState> states;  // parallel to tasks
  std::vector<int> cluster;         // cluster index per agent
  ControllerConfig cfg;
  double dt = 0.005;

  std::size_t index_of(AgentId id) const;  // throws Validation
};

// Index of the first unit at or after `from` with a non-trivial body.
std::size_t next_pending_unit(const AgentTask& task, std::size_t from);

// Funnel at t = 0; throws InfeasibleTask or BadInitial.
HybridState initial_state(const AgentTask& task, const Eigen::VectorXd& x, const ControllerConfig& cfg);

struct Objective {
  const AgentTask* owner = nullptr;
  std::size_t unit = 0;
  const stl::CompiledPsi* psi = nullptr;
  const stl::PhiFormula* phi = nullptr;
  double rho_opt = 0.0;
};

// What agent k currently drives: its own unit, a collaborated unit, or nothing.
std::optional<Objective> active_objective(const Team& team, std::size_t k);

// Raw membership in each jump set, before priority resolution.
struct JumpSets {
  std::optional<Side> exit;     // D'
  bool stage1 = false;          // D'_1
  bool stage2 = false;          // D'_2
  bool stage3 = false;          // D'_3
  std::optional<AgentId> join;  // D''_2, smallest qualifying initiator
  bool satisfied = false;       // D_sat, already excluding D' and D''_2
};

JumpSets memberships(const Team& team, const Eigen::VectorXd& x, std::size_t k);

// Priority: join, then funnel exit, then satisfaction.
std::optional<JumpKind> detect(const Team& team, const Eigen::VectorXd& x, std::size_t k);

HybridState jump(const Team& team, const Eigen::VectorXd& x, std::size_t k, const JumpKind& kind);

// Next unit after a satisfaction jump, if any.
std::optional<stl::PhiFormula> advance_theta(const AgentTask& task, const HybridState& z);

// Per-agent jump budget; rho_bound bounds -rho from below over the run.
std::size_t jump_bound(const ControllerConfig& cfg, double r0, double rho_bound, std::size_t units);

}  // namespace stlfunnel::hybrid
