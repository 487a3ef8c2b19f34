#include "stlfunnel/funnel/funnel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace stlfunnel::funnel {

double gamma_eval(const GammaParams& gp, double t) {
  return (gp.gamma0 - gp.gammaInf) * std::exp(-gp.l * t) + gp.gammaInf;
}

double lower_bound(const FunnelParams& fp, double t) { return fp.rho_max - gamma_eval(fp.gamma, t); }

double transform(double xi) { return std::log(-(xi + 1.0) / xi); }

double inverse_transform(double eps) { return -1.0 / (std::exp(eps) + 1.0); }

double normalized_error(double rho_psi, const FunnelParams& fp, double t) {
  return (rho_psi - fp.rho_max) / gamma_eval(fp.gamma, t);
}

std::optional<Side> exit_side(double xi, double eta) {
  if (!(xi > -1.0 + eta)) return Side::Lower;  // NaN counts as lower
  if (!(xi < -eta)) return Side::Upper;
  return std::nullopt;
}

ErrorTransform transform_error(double rho_psi, const FunnelParams& fp, double t, double eta) {
  ErrorTransform out;
  out.e = rho_psi - fp.rho_max;
  out.xi = out.e / gamma_eval(fp.gamma, t);
  if (auto side = exit_side(out.xi, eta)) throw FunnelExit(*side, out.xi);
  out.eps = transform(out.xi);
  return out;
}

double clamped_epsilon(double xi, double eps_max) {
  if (!(xi > -1.0)) return -eps_max;
  if (!(xi < 0.0)) return eps_max;
  return std::clamp(transform(xi), -eps_max, eps_max);
}

double decay_rate(double gamma0, double gammaInf, double rho_max, double r, double horizon) {
  if (!(horizon > 0.0)) {
    throw Error(ErrorCode::DegenerateWindow, "decay horizon " + std::to_string(horizon) + " is not positive");
  }
  return -std::log((r + gammaInf - rho_max) / (-(gamma0 - gammaInf))) / horizon;
}

double initial_t_star(const stl::PhiFormula& phi, const ControllerConfig& cfg) {
  if (phi.op == stl::TemporalOp::Always) return phi.a;
  return phi.a + cfg.tstar_frac * (phi.b - phi.a);
}

namespace {

struct Levels {
  double rho_max;
  double r;
};

// rho_max inside (lo, rho_opt) and r inside (0, rho_max), evaluated at rho_now.
Levels choose_levels(double rho_now, double rho_opt, const ControllerConfig& cfg) {
  if (!cfg.relaxed && !(rho_opt > 0.0)) {
    throw Error(ErrorCode::InfeasibleTask, "rho_opt = " + std::to_string(rho_opt) + " is not positive");
  }
  double lo = cfg.relaxed ? rho_now : std::max(0.0, rho_now);
  if (!(rho_opt > lo)) {
    throw Error(ErrorCode::BadInitial, "robustness " + std::to_string(rho_now) + " leaves no room below rho_opt " +
                                           std::to_string(rho_opt));
  }
  Levels out;
  out.rho_max = lo + cfg.rho_max_frac * (rho_opt - lo);
  bool admissible = cfg.r < out.rho_max && (cfg.relaxed || cfg.r > 0.0);
  if (admissible) {
    out.r = cfg.r;
  } else if (cfg.relaxed) {
    out.r = rho_now - 0.5 * (out.rho_max - rho_now);
  } else {
    out.r = 0.5 * out.rho_max;
  }
  return out;
}

}  // namespace

FunnelParams select_initial_params(const stl::PhiFormula& phi, double rho0, double rho_opt,
                                   const ControllerConfig& cfg) {
  FunnelParams fp;
  fp.t_star = initial_t_star(phi, cfg);
  Levels lv = choose_levels(rho0, rho_opt, cfg);
  fp.rho_max = lv.rho_max;
  fp.r = lv.r;
  if (fp.t_star == 0.0 && !(rho0 > fp.r)) {
    throw Error(ErrorCode::BadInitial, "t* = 0 requires initial robustness " + std::to_string(rho0) +
                                           " above r = " + std::to_string(fp.r));
  }
  auto& g = fp.gamma;
  g.gamma0 = fp.t_star > 0.0 ? cfg.gamma0_scale * (fp.rho_max - rho0) : fp.rho_max - fp.r;
  g.gammaInf = cfg.gammaInf_frac * std::min(g.gamma0, fp.rho_max - fp.r);
  g.l = -g.gamma0 + fp.rho_max >= fp.r ? 0.0 : decay_rate(g.gamma0, g.gammaInf, fp.rho_max, fp.r, fp.t_star);
  return fp;
}

GammaParams recompute_gamma(double gamma_r, double rho_max_hat, double r_hat, double t_now,
                            double t_star_hat, const ControllerConfig& cfg) {
  GammaParams g;
  g.gammaInf = cfg.gammaInf_frac * std::min(gamma_r, rho_max_hat - r_hat);
  if (-gamma_r + rho_max_hat >= r_hat) {
    g.l = 0.0;
  } else {
    if (!(t_star_hat > t_now)) {
      throw Error(ErrorCode::DegenerateWindow, "repair needs decay but t* = " + std::to_string(t_star_hat) +
                                                   " is not after t = " + std::to_string(t_now));
    }
    g.l = decay_rate(gamma_r, g.gammaInf, rho_max_hat, r_hat, t_star_hat - t_now);
  }
  g.gamma0 = (gamma_r - g.gammaInf) * std::exp(g.l * t_now) + g.gammaInf;
  return g;
}

FunnelParams post_sat_params(const stl::PhiFormula& phi, double rho_now, double rho_opt, double t_now,
                             const ControllerConfig& cfg) {
  FunnelParams fp;
  fp.t_star = phi.op == stl::TemporalOp::Eventually ? phi.b : phi.a;
  Levels lv = choose_levels(rho_now, rho_opt, cfg);
  fp.rho_max = lv.rho_max;
  fp.r = lv.r;
  double gamma_r;
  if (fp.t_star > t_now) {
    gamma_r = cfg.gamma0_scale * (fp.rho_max - rho_now);
  } else {
    // No time left to decay: the floor must already sit at r, below rho_now.
    if (!(rho_now > fp.r)) fp.r = rho_now - 0.5 * (fp.rho_max - rho_now);
    gamma_r = fp.rho_max - fp.r;
  }
  fp.gamma = recompute_gamma(gamma_r, fp.rho_max, fp.r, t_now, fp.t_star, cfg);
  return fp;
}

}  // namespace stlfunnel::funnel
