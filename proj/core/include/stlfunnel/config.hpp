#pragma once

#include <optional>

namespace stlfunnel {

enum class IdlePolicy { Zero, Stabilizing };

// Funnel selection and repair knobs shared by every agent of a scenario.
struct ControllerConfig {
  double r = 0.5;
  double rho_max_frac = 0.9;
  double tstar_frac = 1.0;
  double gamma0_scale = 1.1;
  double gammaInf_frac = 0.5;
  std::optional<double> zeta_u;  // default: half the gap to rho_opt
  std::optional<double> zeta_l;  // default: a tenth of the current funnel width
  double delta = 1.5;
  double sigma = 0.1;
  int N = 1;
  double eta_detect = 1e-3;
  double eps_max = 1e3;
  double gain = 1.0;  // scalar multiplier on the feedback law
  double heading_gain = 1.0;  // extra weight on the heading component of the gradient
  IdlePolicy idle = IdlePolicy::Zero;
  bool relaxed = false;
};

}  // namespace stlfunnel
