#pragma once

#include <Eigen/Dense>

#include "stlfunnel/stl/robustness.hpp"

namespace stlfunnel::stl {

struct OptimizeOptions {
  double grad_tol = 1e-8;
  int max_iter = 10000;
  double divergence_bound = 1e12;
};

struct OptResult {
  double value = 0.0;
  Eigen::VectorXd argmax;
  int iterations = 0;
};

// Supremum of the smooth robustness by gradient ascent with backtracking,
// started from the centroid of the constraint anchors. Throws NonFinite
// when the iterate diverges (unbounded psi).
OptResult rho_opt(const CompiledPsi& psi, const OptimizeOptions& opt = {});
OptResult rho_opt(const PsiFormula& psi, const StateLayout& layout, const OptimizeOptions& opt = {});

Eigen::VectorXd anchor_centroid(const CompiledPsi& psi);

}  // namespace stlfunnel::stl
