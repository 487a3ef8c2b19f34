#include "stlfunnel/stl/formula.hpp"

#include <algorithm>
#include <charconv>
#include <sstream>

namespace stlfunnel::stl {

namespace {

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

struct AtomPrinter {
  std::ostringstream& os;

  void operator()(const LinearAtom& a) const {
    os << "lin(";
    for (std::size_t k = 0; k < a.terms.size(); ++k) {
      const auto& t = a.terms[k];
      if (k) os << ", ";
      os << num(t.coef) << "*x(" << t.agent << "," << t.component + 1 << ")";
    }
    os << ") >= " << num(a.bound);
  }
  void operator()(const PointDistAtom& a) const {
    os << "dist(" << a.agent << ",[";
    for (std::size_t k = 0; k < a.point.size(); ++k) {
      if (k) os << ",";
      os << num(a.point[k]);
    }
    os << "]) <= " << num(a.radius);
  }
  void operator()(const PairDistAtom& a) const {
    os << "dist(" << a.a << "," << a.b << ") <= " << num(a.radius);
  }
  void operator()(const BandDiffAtom& a) const {
    os << "comp(" << a.a << "," << a.comp_a + 1 << ") - comp(" << a.b << "," << a.comp_b + 1
       << ") in (" << num(a.lo) << "," << num(a.hi) << ")";
  }
  void operator()(const AngleBandAtom& a) const {
    os << "angdeg(" << a.agent << ") near " << num(a.center_deg) << " tol " << num(a.tol_deg);
  }
};

void print_psi(std::ostringstream& os, const PsiFormula& psi) {
  if (psi.terms.empty()) {
    os << "true";
    return;
  }
  for (std::size_t k = 0; k < psi.terms.size(); ++k) {
    if (k) os << " && ";
    std::visit(
        [&](const auto& t) {
          using T = std::decay_t<decltype(t)>;
          if constexpr (std::is_same_v<T, True>) {
            os << "true";
          } else {
            if (t.negated) os << "!";
            std::visit(AtomPrinter{os}, t.atom);
          }
        },
        psi.terms[k]);
  }
}

void print_header(std::ostringstream& os, TemporalOp op, double a, double b) {
  os << (op == TemporalOp::Eventually ? "F[" : "G[") << num(a) << "," << num(b) << "] ";
}

}  // namespace

std::string to_string(const Atom& atom) {
  std::ostringstream os;
  std::visit(AtomPrinter{os}, atom);
  return os.str();
}

std::string to_string(const PsiFormula& psi) {
  std::ostringstream os;
  print_psi(os, psi);
  return os.str();
}

std::string to_string(const PhiFormula& phi) {
  std::ostringstream os;
  print_header(os, phi.op, phi.a, phi.b);
  os << "(";
  print_psi(os, phi.body);
  os << ")";
  return os.str();
}

std::string to_string(const TaskFormula& task) {
  if (task.units.empty()) return "true";
  std::ostringstream os;
  if (task.shape == TaskShape::Nest) {
    for (std::size_t k = 0; k < task.units.size(); ++k) {
      const auto& u = task.units[k];
      const auto& w = task.nest_offsets[k];
      print_header(os, u.op, w.first, w.second);
      os << "(";
      const bool last = k + 1 == task.units.size();
      if (!u.body.terms.empty() || last) print_psi(os, u.body);
      if (!u.body.terms.empty() && !last) os << " && ";
    }
    os << std::string(task.units.size(), ')');
    return os.str();
  }
  for (std::size_t k = 0; k < task.units.size(); ++k) {
    if (k) os << " && ";
    os << to_string(task.units[k]);
  }
  return os.str();
}

std::vector<AgentId> agents_of(const Atom& atom) {
  std::vector<AgentId> ids = std::visit(
      [](const auto& a) -> std::vector<AgentId> {
        using T = std::decay_t<decltype(a)>;
        if constexpr (std::is_same_v<T, LinearAtom>) {
          std::vector<AgentId> out;
          for (const auto& t : a.terms) out.push_back(t.agent);
          return out;
        } else if constexpr (std::is_same_v<T, PointDistAtom> || std::is_same_v<T, AngleBandAtom>) {
          return {a.agent};
        } else {
          return {a.a, a.b};
        }
      },
      atom);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  return ids;
}

bool is_affine(const Atom& atom) { return std::holds_alternative<LinearAtom>(atom); }

bool is_trivial(const PsiFormula& psi) {
  return std::all_of(psi.terms.begin(), psi.terms.end(),
                     [](const Term& t) { return std::holds_alternative<True>(t); });
}

}  // namespace stlfunnel::stl
