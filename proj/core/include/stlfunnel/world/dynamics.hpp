#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <utility>
#include <variant>
#include <vector>

#include "stlfunnel/stl/layout.hpp"

namespace stlfunnel::world {

struct SingleIntegrator {
  int n = 2;
};

// Three-wheeled omni-directional base; state (x, y, heading), input wheel rates.
struct OmniRobot {
  double R = 0.02;
  double L = 0.2;
};

using DynamicsModel = std::variant<SingleIntegrator, OmniRobot>;

int state_dim(const DynamicsModel& m);
int input_dim(const DynamicsModel& m);

// f(x); zero for both shipped models. Throws DimensionMismatch.
Eigen::VectorXd drift(const DynamicsModel& m, const Eigen::VectorXd& x);
// g(x), state_dim x input_dim. Throws DimensionMismatch.
Eigen::MatrixXd actuation(const DynamicsModel& m, const Eigen::VectorXd& x);

// Geometry matrix B of the omni base.
Eigen::Matrix3d omni_geometry(const OmniRobot& m);

struct NoCoupling {};

// clamp(gain * sum_j (x_j - x_i)) over the listed undirected edges.
struct SaturatedConsensus {
  double gain = 0.0;
  double bound = 0.0;
  std::vector<std::pair<stl::AgentId, stl::AgentId>> edges;
};

using CouplingModel = std::variant<NoCoupling, SaturatedConsensus>;

Eigen::VectorXd coupling(const CouplingModel& m, const stl::StateLayout& layout, const Eigen::VectorXd& x,
                         stl::AgentId i);

// Uniform sample in the box [-h, h], a pure function of (seed, step, agent).
Eigen::VectorXd sample_noise(const Eigen::VectorXd& half_width, std::uint64_t seed, std::uint64_t step,
                             stl::AgentId agent);

}  // namespace stlfunnel::world
