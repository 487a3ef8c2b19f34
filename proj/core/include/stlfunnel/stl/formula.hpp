#pragma once

#include <string>
#include <variant>
#include <vector>

namespace stlfunnel::stl {

using AgentId = int;

// Component indices are 0-based here; the text grammar uses 1-based.
struct LinTerm {
  double coef = 0.0;
  AgentId agent = 0;
  int component = 0;
  bool operator==(const LinTerm&) const = default;
};

// sum(coef * x) >= bound
struct LinearAtom {
  std::vector<LinTerm> terms;
  double bound = 0.0;
  bool operator==(const LinearAtom&) const = default;
};

// ||p_agent - point|| <= radius, using the first point.size() components
struct PointDistAtom {
  AgentId agent = 0;
  std::vector<double> point;
  double radius = 0.0;
  bool operator==(const PointDistAtom&) const = default;
};

// ||p_a - p_b|| <= radius over planar positions
struct PairDistAtom {
  AgentId a = 0;
  AgentId b = 0;
  double radius = 0.0;
  bool operator==(const PairDistAtom&) const = default;
};

// lo < x_a[ca] - x_b[cb] < hi
struct BandDiffAtom {
  AgentId a = 0;
  int comp_a = 0;
  AgentId b = 0;
  int comp_b = 0;
  double lo = 0.0;
  double hi = 0.0;
  bool operator==(const BandDiffAtom&) const = default;
};

// |deg(heading) - center| < tol, robustness in degrees
struct AngleBandAtom {
  AgentId agent = 0;
  double center_deg = 0.0;
  double tol_deg = 0.0;
  bool operator==(const AngleBandAtom&) const = default;
};

using Atom = std::variant<LinearAtom, PointDistAtom, PairDistAtom, BandDiffAtom, AngleBandAtom>;

struct Literal {
  Atom atom;
  bool negated = false;
  bool operator==(const Literal&) const = default;
};

struct True {
  bool operator==(const True&) const = default;
};

using Term = std::variant<True, Literal>;

// Flat conjunction; an empty list or only True terms is trivially true.
struct PsiFormula {
  std::vector<Term> terms;
  bool operator==(const PsiFormula&) const = default;
};

enum class TemporalOp { Eventually, Always };

struct PhiFormula {
  TemporalOp op = TemporalOp::Eventually;
  double a = 0.0;
  double b = 0.0;
  PsiFormula body;
  bool operator==(const PhiFormula&) const = default;
};

enum class TaskShape { Trivial, Single, Sequence, Nest };

struct TaskFormula {
  std::vector<PhiFormula> units;
  TaskShape shape = TaskShape::Trivial;
  // For nests: the windows as written, before accumulation.
  std::vector<std::pair<double, double>> nest_offsets;
  bool operator==(const TaskFormula&) const = default;
};

std::string to_string(const Atom& atom);
std::string to_string(const PsiFormula& psi);
std::string to_string(const PhiFormula& phi);
std::string to_string(const TaskFormula& task);

// Agents read by the atom, ascending, without duplicates.
std::vector<AgentId> agents_of(const Atom& atom);

bool is_affine(const Atom& atom);
bool is_trivial(const PsiFormula& psi);

}  // namespace stlfunnel::stl
