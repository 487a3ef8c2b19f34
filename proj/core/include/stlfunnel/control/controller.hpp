#pragma once

#include <Eigen/Dense>
#include <limits>

#include "stlfunnel/config.hpp"
#include "stlfunnel/funnel/funnel.hpp"
#include "stlfunnel/stl/robustness.hpp"
#include "stlfunnel/world/dynamics.hpp"

namespace stlfunnel::control {

struct ControlContext {
  stl::AgentId agent = 0;
  const world::DynamicsModel* model = nullptr;
  const stl::StateLayout* layout = nullptr;
  const Eigen::VectorXd* x = nullptr;  // full stacked state
  double t = 0.0;
  const stl::CompiledPsi* psi = nullptr;  // own or collaborated objective
  funnel::FunnelParams params;
  double u_max = std::numeric_limits<double>::infinity();
  const ControllerConfig* cfg = nullptr;
};

// Throw raises FunnelExit outside (-1, 0); Saturate maps to +-eps_max.
enum class ExitPolicy { Throw, Saturate };

struct ControlOutput {
  Eigen::VectorXd u;
  double rho = 0.0;
  double xi = 0.0;
  double eps = 0.0;  // after clamping
  bool singular = false;
};

// u = -gain * eps * g(x_i)^T * d rho / d x_i, then ||u|| <= u_max.
ControlOutput ppc_control(const ControlContext& ctx, ExitPolicy policy = ExitPolicy::Throw);

// Same law on the initiator's objective; throws ParamMismatch when the
// local funnel differs from the initiator's.
ControlOutput collaborative_control(const ControlContext& ctx, const funnel::FunnelParams& initiator,
                                    ExitPolicy policy = ExitPolicy::Throw);

Eigen::VectorXd idle_control(const world::DynamicsModel& model, const Eigen::VectorXd& xi, IdlePolicy policy);

// Rescales u onto the ball of radius u_max, preserving direction.
Eigen::VectorXd saturate(const Eigen::VectorXd& u, double u_max);

}  // namespace stlfunnel::control
