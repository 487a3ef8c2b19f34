#include <algorithm>
#include <cstdio>
#include <limits>

#include "stlfunnel/error.hpp"
#include "stlfunnel/stl/robustness.hpp"

namespace stlfunnel::stl {

namespace {

[[noreturn]] void not_covered(double lo, double hi, double first, double last) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "window [%.9g, %.9g] not inside trace span [%.9g, %.9g]", lo, hi, first,
                last);
  throw Error(ErrorCode::WindowNotCovered, buf);
}

}  // namespace

double window_robustness(TemporalOp op, std::span<const double> times, std::span<const double> rho,
                         double lo, double hi) {
  if (times.empty()) not_covered(lo, hi, 0.0, 0.0);
  if (times.front() > lo + kWindowTol || times.back() < hi - kWindowTol) {
    not_covered(lo, hi, times.front(), times.back());
  }
  bool any = false;
  double best = op == TemporalOp::Eventually ? -std::numeric_limits<double>::infinity()
                                             : std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (times[k] < lo - kWindowTol || times[k] > hi + kWindowTol) continue;
    any = true;
    best = op == TemporalOp::Eventually ? std::max(best, rho[k]) : std::min(best, rho[k]);
  }
  if (!any) not_covered(lo, hi, times.front(), times.back());
  return best;
}

double trace_robustness(const PhiFormula& phi, const StateLayout& layout, const Trace& trace, double t0,
                        Semantics sem) {
  CompiledPsi c = compile(phi.body, layout);
  double lo = t0 + phi.a;
  double hi = t0 + phi.b;
  std::vector<double> rho(trace.t.size(), std::numeric_limits<double>::quiet_NaN());
  for (std::size_t k = 0; k < trace.t.size(); ++k) {
    if (trace.t[k] < lo - kWindowTol || trace.t[k] > hi + kWindowTol) continue;
    rho[k] = sem == Semantics::Smooth ? smooth_robustness(c, trace.x[k]) : crisp_robustness(c, trace.x[k]);
  }
  return window_robustness(phi.op, trace.t, rho, lo, hi);
}

double trace_robustness(const TaskFormula& task, const StateLayout& layout, const Trace& trace,
                        double t0, Semantics sem) {
  double out = std::numeric_limits<double>::infinity();
  for (const auto& u : task.units) out = std::min(out, trace_robustness(u, layout, trace, t0, sem));
  return out;
}

}  // namespace stlfunnel::stl
