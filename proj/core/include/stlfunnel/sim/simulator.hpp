#pragma once

#include <Eigen/Dense>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "stlfunnel/hybrid/hybrid.hpp"
#include "stlfunnel/sim/scenario.hpp"
#include "stlfunnel/topology/topology.hpp"

namespace stlfunnel::sim {

struct AgentSample {
  Eigen::VectorXd x;
  Eigen::VectorXd u;
  double rho_psi = 0.0;    // active objective; NaN while free
  double rho_max = 0.0;
  double funnel_lo = 0.0;  // rho_max - gamma(t)
  double xi = 0.0;
  double eps = 0.0;
  int n_repairs = 0;
  int collab = 0;
  std::size_t unit_index = 0;
  bool singular = false;
};

struct TrajectoryLog {
  std::vector<AgentId> agents;
  std::vector<double> t;
  std::vector<std::vector<AgentSample>> samples;  // [step][agent]
};

struct JumpEvent {
  double t = 0.0;
  std::size_t jump_index = 0;
  AgentId agent = 0;
  hybrid::JumpKind kind;
  hybrid::HybridState before;
  hybrid::HybridState after;
};

struct AgentSummary {
  AgentId id = 0;
  std::string formula;
  double r_initial = 0.0;
  double r_pursued = 0.0;  // r in force when the own task completed, else final r
  double r_final = 0.0;
  std::map<std::string, int> jumps;
  int total_jumps = 0;
  std::size_t jump_bound = 0;
  double min_rho = 0.0;
  std::vector<std::optional<double>> unit_robustness;  // trace robustness at t = 0
  std::optional<double> task_robustness;
  std::optional<double> satisfied_at;  // time of the jump completing the own task
  bool satisfied = false;
};

struct RunSummary {
  std::string scenario;
  std::size_t steps = 0;
  std::size_t total_jumps = 0;
  topology::ClusterPartition clusters;
  std::vector<AgentSummary> agents;
  bool relaxed = false;
};

struct RunResult {
  TrajectoryLog trajectory;
  std::vector<JumpEvent> events;
  RunSummary summary;
};

// Throws NonFiniteState, JumpStorm, or the funnel selection errors.
RunResult run(const Scenario& scenario);

stl::StateLayout layout_of(const Scenario& scenario);
std::map<AgentId, stl::TaskFormula> tasks_of(const Scenario& scenario);

// One fixed step of the closed loop with inputs and noise held constant.
Eigen::VectorXd rk4_step(const Scenario& scenario, const stl::StateLayout& layout, const Eigen::VectorXd& x,
                         const std::vector<Eigen::VectorXd>& u, const std::vector<Eigen::VectorXd>& w, double dt);

// Stacked trace of the logged states, for trace robustness.
stl::Trace trace_of(const TrajectoryLog& log);

}  // namespace stlfunnel::sim
