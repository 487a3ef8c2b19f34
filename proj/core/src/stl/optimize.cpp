#include "stlfunnel/stl/optimize.hpp"

#include <cmath>
#include <limits>
#include <map>

#include "stlfunnel/error.hpp"

namespace stlfunnel::stl {

Eigen::VectorXd anchor_centroid(const CompiledPsi& psi) {
  Eigen::VectorXd x = Eigen::VectorXd::Zero(psi.dim);
  std::map<int, std::pair<double, int>> by_index;
  std::map<int, std::pair<double, int>> by_component;
  for (const auto& [i, v] : psi.anchors) {
    auto& a = by_index[i];
    a.first += v;
    ++a.second;
    auto& c = by_component[psi.component[i]];
    c.first += v;
    ++c.second;
  }
  for (int i = 0; i < psi.dim; ++i) {
    if (auto it = by_index.find(i); it != by_index.end()) {
      x[i] = it->second.first / it->second.second;
    } else if (auto jt = by_component.find(psi.component[i]); jt != by_component.end()) {
      x[i] = jt->second.first / jt->second.second;
    }
  }
  return x;
}

OptResult rho_opt(const CompiledPsi& psi, const OptimizeOptions& opt) {
  OptResult res;
  res.argmax = anchor_centroid(psi);
  if (psi.trivial()) {
    res.value = std::numeric_limits<double>::infinity();
    return res;
  }

  Eigen::VectorXd& x = res.argmax;
  double f = smooth_robustness(psi, x);
  double step = 1.0;
  constexpr double kArmijo = 1e-4;
  constexpr double kMinStep = 1e-20;

  for (res.iterations = 0; res.iterations < opt.max_iter; ++res.iterations) {
    SmoothEval ev = smooth_gradient(psi, x);
    double gn2 = ev.gradient.squaredNorm();
    if (std::sqrt(gn2) < opt.grad_tol) break;

    double s = step * 2.0;
    Eigen::VectorXd next;
    double fn = 0.0;
    bool moved = false;
    while (s >= kMinStep) {
      next = x + s * ev.gradient;
      fn = smooth_robustness(psi, next);
      if (fn >= f + kArmijo * s * gn2) {
        moved = true;
        break;
      }
      s *= 0.5;
    }
    if (!moved) break;  // kink: no ascent at any representable step
    x = std::move(next);
    f = fn;
    step = s;
    if (!std::isfinite(f) || x.lpNorm<Eigen::Infinity>() > opt.divergence_bound) {
      throw Error(ErrorCode::NonFinite, "robustness maximization diverged; psi is unbounded");
    }
  }
  res.value = f;
  return res;
}

OptResult rho_opt(const PsiFormula& psi, const StateLayout& layout, const OptimizeOptions& opt) {
  return rho_opt(compile(psi, layout), opt);
}

}  // namespace stlfunnel::stl
