#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "stlfunnel/config.hpp"
#include "stlfunnel/stl/formula.hpp"
#include "stlfunnel/world/dynamics.hpp"

namespace stlfunnel::sim {

using stl::AgentId;

struct AgentSpec {
  AgentId id = 0;
  world::DynamicsModel model;
  Eigen::VectorXd x0;
  double u_max = std::numeric_limits<double>::infinity();
  Eigen::VectorXd noise;  // box half-widths, empty means none
};

struct TaskSpec {
  AgentId agent = 0;
  std::string formula;
  stl::TaskFormula parsed;
};

struct SimConfig {
  double dt = 0.005;
  double t_end = 15.0;
  std::uint64_t seed = 0;
  int max_jumps_per_step = 4;
};

struct Scenario {
  std::string name;
  std::vector<AgentSpec> agents;  // ascending id after validation
  std::vector<TaskSpec> tasks;    // agents without an entry carry "true"
  std::optional<std::vector<std::pair<AgentId, AgentId>>> comm_edges;
  world::CouplingModel coupling = world::NoCoupling{};
  ControllerConfig controller;
  SimConfig sim;
};

}  // namespace stlfunnel::sim
