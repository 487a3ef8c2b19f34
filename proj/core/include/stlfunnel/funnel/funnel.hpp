#pragma once

#include <optional>

#include "stlfunnel/config.hpp"
#include "stlfunnel/error.hpp"
#include "stlfunnel/stl/formula.hpp"

namespace stlfunnel::funnel {

struct GammaParams {
  double gamma0 = 1.0;
  double gammaInf = 1.0;
  double l = 0.0;
  bool operator==(const GammaParams&) const = default;
};

struct FunnelParams {
  double t_star = 0.0;
  double rho_max = 1.0;
  double r = 0.5;
  GammaParams gamma;
  bool operator==(const FunnelParams&) const = default;
};

double gamma_eval(const GammaParams& gp, double t);
double lower_bound(const FunnelParams& fp, double t);  // rho_max - gamma(t)

// S(xi) = ln(-(xi + 1) / xi) and its inverse.
double transform(double xi);
double inverse_transform(double eps);

double normalized_error(double rho_psi, const FunnelParams& fp, double t);

struct ErrorTransform {
  double e = 0.0;
  double xi = 0.0;
  double eps = 0.0;
};

// Throws FunnelExit when xi leaves (-1 + eta, -eta).
ErrorTransform transform_error(double rho_psi, const FunnelParams& fp, double t, double eta = 1e-3);

// Which boundary xi violates under margin eta, if any.
std::optional<Side> exit_side(double xi, double eta);

// Saturated transform used by the flow: xi outside (-1, 0) maps to +-eps_max.
double clamped_epsilon(double xi, double eps_max);

// Decay rate that makes rho_max - gamma reach r after `horizon` seconds.
double decay_rate(double gamma0, double gammaInf, double rho_max, double r, double horizon);

double initial_t_star(const stl::PhiFormula& phi, const ControllerConfig& cfg);

// Throws InfeasibleTask or BadInitial.
FunnelParams select_initial_params(const stl::PhiFormula& phi, double rho0, double rho_opt,
                                   const ControllerConfig& cfg);

// Throws DegenerateWindow.
GammaParams recompute_gamma(double gamma_r, double rho_max_hat, double r_hat, double t_now,
                            double t_star_hat, const ControllerConfig& cfg);

FunnelParams post_sat_params(const stl::PhiFormula& phi, double rho_now, double rho_opt, double t_now,
                             const ControllerConfig& cfg);

}  // namespace stlfunnel::funnel
