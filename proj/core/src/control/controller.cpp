#include "stlfunnel/control/controller.hpp"

#include <cmath>

#include "stlfunnel/error.hpp"

namespace stlfunnel::control {

Eigen::VectorXd saturate(const Eigen::VectorXd& u, double u_max) {
  double n = u.norm();
  if (n > u_max) return u * (u_max / n);
  return u;
}

ControlOutput ppc_control(const ControlContext& ctx, ExitPolicy policy) {
  const auto& slot = ctx.layout->slot(ctx.agent);
  const Eigen::VectorXd& x = *ctx.x;
  stl::SmoothEval ev = stl::smooth_gradient(*ctx.psi, x);

  ControlOutput out;
  out.rho = ev.value;
  out.singular = ev.singular;
  out.xi = funnel::normalized_error(ev.value, ctx.params, ctx.t);
  if (policy == ExitPolicy::Throw) {
    if (auto side = funnel::exit_side(out.xi, 0.0)) throw FunnelExit(*side, out.xi);
  }
  out.eps = funnel::clamped_epsilon(out.xi, ctx.cfg->eps_max);

  Eigen::VectorXd xi = x.segment(slot.offset, slot.dim);
  Eigen::MatrixXd g = world::actuation(*ctx.model, xi);
  Eigen::VectorXd grad = ev.gradient.segment(slot.offset, slot.dim);
  if (grad.size() > stl::kHeadingComponent) grad[stl::kHeadingComponent] *= ctx.cfg->heading_gain;
  out.u = saturate(-ctx.cfg->gain * out.eps * (g.transpose() * grad), ctx.u_max);
  return out;
}

ControlOutput collaborative_control(const ControlContext& ctx, const funnel::FunnelParams& initiator,
                                    ExitPolicy policy) {
  if (!(ctx.params == initiator)) {
    throw Error(ErrorCode::ParamMismatch,
                "agent " + std::to_string(ctx.agent) + " collaborates with a funnel that differs from the initiator's");
  }
  return ppc_control(ctx, policy);
}

Eigen::VectorXd idle_control(const world::DynamicsModel& model, const Eigen::VectorXd& xi, IdlePolicy policy) {
  int m = world::input_dim(model);
  if (policy == IdlePolicy::Zero) return Eigen::VectorXd::Zero(m);
  return -world::actuation(model, xi).transpose() * xi;
}

}  // namespace stlfunnel::control
