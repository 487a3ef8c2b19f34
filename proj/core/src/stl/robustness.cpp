#include "stlfunnel/stl/robustness.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "stlfunnel/error.hpp"

namespace stlfunnel::stl {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

AffineConstraint affine(const std::map<int, double>& coef, double offset) {
  AffineConstraint a;
  for (const auto& [i, c] : coef) {
    if (c != 0.0) a.coef.emplace_back(i, c);
  }
  a.offset = offset;
  return a;
}

struct Lowering {
  const StateLayout& layout;
  CompiledPsi& out;
  bool negated;

  std::vector<int> position(AgentId id, int dims) const {
    if (dims > layout.slot(id).dim) {
      throw Error(ErrorCode::SelectorOutOfRange,
                  "agent " + std::to_string(id) + " has fewer than " + std::to_string(dims) + " components");
    }
    std::vector<int> idx;
    for (int k = 0; k < dims; ++k) idx.push_back(layout.index(id, k));
    return idx;
  }

  void operator()(const LinearAtom& a) const {
    std::map<int, double> coef;
    for (const auto& t : a.terms) coef[layout.index(t.agent, t.component)] += t.coef;
    double sign = negated ? -1.0 : 1.0;
    for (auto& [i, c] : coef) c *= sign;
    out.constraints.push_back(affine(coef, -sign * a.bound));
  }

  void operator()(const PointDistAtom& a) const {
    BallConstraint b;
    b.lhs = position(a.agent, static_cast<int>(a.point.size()));
    b.center = a.point;
    b.radius = a.radius;
    for (std::size_t k = 0; k < b.lhs.size(); ++k) out.anchors.emplace_back(b.lhs[k], b.center[k]);
    out.constraints.push_back(std::move(b));
  }

  void operator()(const PairDistAtom& a) const {
    int dims = std::min(layout.position_dim(a.a), layout.position_dim(a.b));
    BallConstraint b;
    b.lhs = position(a.a, dims);
    b.rhs = position(a.b, dims);
    b.radius = a.radius;
    out.constraints.push_back(std::move(b));
  }

  void operator()(const BandDiffAtom& a) const {
    std::map<int, double> diff;
    diff[layout.index(a.a, a.comp_a)] += 1.0;
    diff[layout.index(a.b, a.comp_b)] -= 1.0;
    std::map<int, double> neg = diff;
    for (auto& [i, c] : neg) c = -c;
    out.constraints.push_back(affine(diff, -a.lo));
    out.constraints.push_back(affine(neg, a.hi));
  }

  void operator()(const AngleBandAtom& a) const {
    int i = layout.index(a.agent, kHeadingComponent);
    out.constraints.push_back(affine({{i, -kRadToDeg}}, a.tol_deg + a.center_deg));
    out.constraints.push_back(affine({{i, kRadToDeg}}, a.tol_deg - a.center_deg));
    out.anchors.emplace_back(i, a.center_deg / kRadToDeg);
  }
};

double distance(const BallConstraint& b, const Eigen::VectorXd& x) {
  double s = 0.0;
  for (std::size_t k = 0; k < b.lhs.size(); ++k) {
    double other = b.rhs.empty() ? b.center[k] : x[b.rhs[k]];
    double d = x[b.lhs[k]] - other;
    s += d * d;
  }
  return std::sqrt(s);
}

double value(const Constraint& c, const Eigen::VectorXd& x) {
  if (const auto* a = std::get_if<AffineConstraint>(&c)) {
    double v = a->offset;
    for (const auto& [i, k] : a->coef) v += k * x[i];
    return v;
  }
  const auto& b = std::get<BallConstraint>(c);
  return b.radius - distance(b, x);
}

void check_dim(const CompiledPsi& c, const Eigen::VectorXd& x) {
  if (x.size() != c.dim) {
    throw Error(ErrorCode::DimensionMismatch, "state has " + std::to_string(x.size()) +
                                                  " entries, layout expects " + std::to_string(c.dim));
  }
}

}  // namespace

CompiledPsi compile(const PsiFormula& psi, const StateLayout& layout) {
  CompiledPsi out;
  out.dim = layout.size();
  out.component.resize(out.dim);
  for (const auto& s : layout.slots()) {
    for (int k = 0; k < s.dim; ++k) out.component[s.offset + k] = k;
  }
  for (const auto& term : psi.terms) {
    if (const auto* lit = std::get_if<Literal>(&term)) {
      std::visit(Lowering{layout, out, lit->negated}, lit->atom);
    }
  }
  return out;
}

double smooth_min(std::span<const double> rho) {
  if (rho.empty()) return kInf;
  if (rho.size() == 1) return rho[0];
  double m = *std::min_element(rho.begin(), rho.end());
  double s = 0.0;
  for (double r : rho) s += std::exp(-(r - m));
  return m - std::log(s);
}

void constraint_values(const CompiledPsi& c, const Eigen::VectorXd& x, std::vector<double>& out) {
  check_dim(c, x);
  out.resize(c.constraints.size());
  for (std::size_t k = 0; k < c.constraints.size(); ++k) out[k] = value(c.constraints[k], x);
}

double smooth_robustness(const CompiledPsi& c, const Eigen::VectorXd& x) {
  std::vector<double> rho;
  constraint_values(c, x, rho);
  return smooth_min(rho);
}

double crisp_robustness(const CompiledPsi& c, const Eigen::VectorXd& x) {
  std::vector<double> rho;
  constraint_values(c, x, rho);
  if (rho.empty()) return kInf;
  return *std::min_element(rho.begin(), rho.end());
}

SmoothEval smooth_gradient(const CompiledPsi& c, const Eigen::VectorXd& x) {
  SmoothEval ev;
  ev.gradient = Eigen::VectorXd::Zero(c.dim);
  std::vector<double> rho;
  constraint_values(c, x, rho);
  ev.value = smooth_min(rho);
  if (rho.empty()) return ev;

  double m = *std::min_element(rho.begin(), rho.end());
  std::vector<double> w(rho.size());
  double s = 0.0;
  for (std::size_t k = 0; k < rho.size(); ++k) {
    w[k] = std::exp(-(rho[k] - m));
    s += w[k];
  }
  double wsum = 0.0;
  for (auto& wk : w) {
    wk /= s;
    wsum += wk;
  }
  assert(std::abs(wsum - 1.0) < 1e-12);
  (void)wsum;

  for (std::size_t k = 0; k < c.constraints.size(); ++k) {
    const auto& con = c.constraints[k];
    if (const auto* a = std::get_if<AffineConstraint>(&con)) {
      for (const auto& [i, coef] : a->coef) ev.gradient[i] += w[k] * coef;
      continue;
    }
    const auto& b = std::get<BallConstraint>(con);
    double d = distance(b, x);
    if (d == 0.0) {
      ev.singular = true;
      continue;
    }
    for (std::size_t j = 0; j < b.lhs.size(); ++j) {
      double other = b.rhs.empty() ? b.center[j] : x[b.rhs[j]];
      double u = (x[b.lhs[j]] - other) / d;
      ev.gradient[b.lhs[j]] -= w[k] * u;
      if (!b.rhs.empty()) ev.gradient[b.rhs[j]] += w[k] * u;
    }
  }
  return ev;
}

double smooth_robustness(const PsiFormula& psi, const StateLayout& layout, const Eigen::VectorXd& x) {
  return smooth_robustness(compile(psi, layout), x);
}

double crisp_robustness(const PsiFormula& psi, const StateLayout& layout, const Eigen::VectorXd& x) {
  return crisp_robustness(compile(psi, layout), x);
}

SmoothEval smooth_gradient(const PsiFormula& psi, const StateLayout& layout, const Eigen::VectorXd& x) {
  return smooth_gradient(compile(psi, layout), x);
}

std::vector<AgentId> participants(const PhiFormula& phi, AgentId owner) {
  std::vector<AgentId> ids{owner};
  for (const auto& term : phi.body.terms) {
    if (const auto* lit = std::get_if<Literal>(&term)) {
      auto more = agents_of(lit->atom);
      ids.insert(ids.end(), more.begin(), more.end());
    }
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

std::vector<AgentId> participants(const TaskFormula& task, AgentId owner) {
  std::vector<AgentId> ids{owner};
  for (const auto& u : task.units) {
    auto more = participants(u, owner);
    ids.insert(ids.end(), more.begin(), more.end());
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

}  // namespace stlfunnel::stl
