#pragma once

#include <Eigen/Dense>
#include <span>
#include <variant>
#include <vector>

#include "stlfunnel/stl/formula.hpp"
#include "stlfunnel/stl/layout.hpp"

namespace stlfunnel::stl {

// h(x) = sum coef_k * x[idx_k] + offset
struct AffineConstraint {
  std::vector<std::pair<int, double>> coef;
  double offset = 0.0;
};

// h(x) = radius - ||x[lhs] - (x[rhs] or center)||
struct BallConstraint {
  std::vector<int> lhs;
  std::vector<int> rhs;  // empty for a fixed center
  std::vector<double> center;
  double radius = 0.0;
};

using Constraint = std::variant<AffineConstraint, BallConstraint>;

// A psi conjunction lowered onto a concrete state layout.
struct CompiledPsi {
  std::vector<Constraint> constraints;
  int dim = 0;
  // (index, value) reference coordinates used to seed maximization
  std::vector<std::pair<int, double>> anchors;
  // per stacked index: the agent-local component number
  std::vector<int> component;

  bool trivial() const { return constraints.empty(); }
};

CompiledPsi compile(const PsiFormula& psi, const StateLayout& layout);

struct SmoothEval {
  double value = 0.0;
  Eigen::VectorXd gradient;
  bool singular = false;  // a ball constraint was evaluated at its center
};

// -ln sum exp(-rho_k), shifted by the minimum; +inf for an empty list.
double smooth_min(std::span<const double> rho);

void constraint_values(const CompiledPsi& c, const Eigen::VectorXd& x, std::vector<double>& out);

double smooth_robustness(const CompiledPsi& c, const Eigen::VectorXd& x);
double crisp_robustness(const CompiledPsi& c, const Eigen::VectorXd& x);
SmoothEval smooth_gradient(const CompiledPsi& c, const Eigen::VectorXd& x);

double smooth_robustness(const PsiFormula& psi, const StateLayout& layout, const Eigen::VectorXd& x);
double crisp_robustness(const PsiFormula& psi, const StateLayout& layout, const Eigen::VectorXd& x);
SmoothEval smooth_gradient(const PsiFormula& psi, const StateLayout& layout, const Eigen::VectorXd& x);

// Agents read by the task, always including the owner; ascending.
std::vector<AgentId> participants(const TaskFormula& task, AgentId owner);
std::vector<AgentId> participants(const PhiFormula& phi, AgentId owner);

// Uniformly sampled trajectory over a fixed layout.
struct Trace {
  std::vector<double> t;
  std::vector<Eigen::VectorXd> x;
};

enum class Semantics { Smooth, Crisp };

// Sample times within this distance of a window edge count as inside.
inline constexpr double kWindowTol = 1e-9;

// Max (F) or min (G) of samples whose time lies in [lo, hi].
double window_robustness(TemporalOp op, std::span<const double> times, std::span<const double> rho,
                         double lo, double hi);

double trace_robustness(const PhiFormula& phi, const StateLayout& layout, const Trace& trace, double t0,
                        Semantics sem = Semantics::Smooth);
double trace_robustness(const TaskFormula& task, const StateLayout& layout, const Trace& trace,
                        double t0, Semantics sem = Semantics::Smooth);

}  // namespace stlfunnel::stl
