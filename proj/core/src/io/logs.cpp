#include "stlfunnel/io/logs.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <nlohmann/json.hpp>

#include "stlfunnel/error.hpp"

namespace stlfunnel::io {

namespace {

using ojson = nlohmann::ordered_json;

// Shortest text that reads back to the same double; "nan" for missing.
std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// JSON has no inf/nan; those become null.
ojson jnum(double v) { return std::isfinite(v) ? ojson(v) : ojson(nullptr); }

ojson to_json(const hybrid::HybridState& z) {
  const auto& f = z.funnel;
  return ojson{{"clock", jnum(z.clock)},
               {"unit_index", z.unit_index},
               {"n_repairs", z.repair.n_repairs},
               {"collab", z.repair.collab},
               {"collab_unit", z.repair.collab_unit},
               {"t_star", jnum(f.t_star)},
               {"rho_max", jnum(f.rho_max)},
               {"r", jnum(f.r)},
               {"gamma0", jnum(f.gamma.gamma0)},
               {"gammaInf", jnum(f.gamma.gammaInf)},
               {"l", jnum(f.gamma.l)}};
}

ojson to_json(const hybrid::JumpKind& k) {
  ojson j{{"type", hybrid::to_string(k.type)}};
  if (k.type == hybrid::JumpType::Stage2Join) {
    j["initiator"] = k.initiator;
  } else if (k.type != hybrid::JumpType::Satisfied) {
    j["side"] = to_string(k.side);
  }
  return j;
}

std::ofstream open(const std::filesystem::path& p) {
  std::ofstream os(p, std::ios::binary);
  if (!os) throw Error(ErrorCode::Io, "cannot write " + p.string());
  return os;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const sim::TrajectoryLog& log) {
  Eigen::Index nx = 0;
  Eigen::Index nu = 0;
  for (const auto& row : log.samples) {
    for (const auto& s : row) {
      nx = std::max(nx, s.x.size());
      nu = std::max(nu, s.u.size());
    }
  }
  os << "t,agent";
  for (Eigen::Index k = 1; k <= nx; ++k) os << ",x" << k;
  for (Eigen::Index k = 1; k <= nu; ++k) os << ",u" << k;
  os << ",rho_psi,rho_max,funnel_lo,xi,eps,n_repairs,collab,unit_index\n";

  for (std::size_t step = 0; step < log.samples.size(); ++step) {
    const std::string t = num(log.t[step]);
    for (std::size_t a = 0; a < log.samples[step].size(); ++a) {
      const auto& s = log.samples[step][a];
      os << t << ',' << log.agents[a];
      for (Eigen::Index k = 0; k < nx; ++k) os << ',' << (k < s.x.size() ? num(s.x[k]) : "nan");
      for (Eigen::Index k = 0; k < nu; ++k) os << ',' << (k < s.u.size() ? num(s.u[k]) : "nan");
      os << ',' << num(s.rho_psi) << ',' << num(s.rho_max) << ',' << num(s.funnel_lo) << ',' << num(s.xi)
         << ',' << num(s.eps) << ',' << s.n_repairs << ',' << s.collab << ',' << s.unit_index << '\n';
    }
  }
}

void write_events_jsonl(std::ostream& os, const std::vector<sim::JumpEvent>& events) {
  for (const auto& ev : events) {
    ojson j{{"t", jnum(ev.t)},
            {"jump_index", ev.jump_index},
            {"agent", ev.agent},
            {"kind", to_json(ev.kind)},
            {"before", to_json(ev.before)},
            {"after", to_json(ev.after)}};
    os << j.dump() << '\n';
  }
}

void write_summary_json(std::ostream& os, const sim::RunSummary& summary) {
  ojson clusters = ojson::array();
  for (const auto& c : summary.clusters.clusters) {
    clusters.push_back({{"agents", c.agents}, {"case_a", c.case_a}, {"comm_ok", c.comm_ok}});
  }
  ojson agents = ojson::array();
  for (const auto& a : summary.agents) {
    ojson units = ojson::array();
    for (const auto& u : a.unit_robustness) units.push_back(u ? jnum(*u) : ojson(nullptr));
    ojson jumps = ojson::object();
    for (const auto& [k, v] : a.jumps) jumps[k] = v;
    agents.push_back({{"id", a.id},
                      {"formula", a.formula},
                      {"verdict", a.satisfied ? "satisfied" : "violated"},
                      {"r_initial", jnum(a.r_initial)},
                      {"r_pursued", jnum(a.r_pursued)},
                      {"r_final", jnum(a.r_final)},
                      {"jumps", jumps},
                      {"total_jumps", a.total_jumps},
                      {"jump_bound", a.jump_bound},
                      {"min_rho", jnum(a.min_rho)},
                      {"unit_robustness", units},
                      {"task_robustness", a.task_robustness ? jnum(*a.task_robustness) : ojson(nullptr)},
                      {"satisfied_at", a.satisfied_at ? jnum(*a.satisfied_at) : ojson(nullptr)}});
  }
  ojson j{{"scenario", summary.scenario},
          {"steps", summary.steps},
          {"total_jumps", summary.total_jumps},
          {"relaxed", summary.relaxed},
          {"clusters", clusters},
          {"agents", agents}};
  os << j.dump(2) << '\n';
}

OutputPaths write_run(const std::filesystem::path& dir, const sim::RunResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create " + dir.string() + ": " + ec.message());
  OutputPaths p{dir / "traj.csv", dir / "events.jsonl", dir / "summary.json"};
  {
    auto os = open(p.trajectory);
    write_trajectory_csv(os, result.trajectory);
  }
  {
    auto os = open(p.events);
    write_events_jsonl(os, result.events);
  }
  {
    auto os = open(p.summary);
    write_summary_json(os, result.summary);
  }
  return p;
}

}  // namespace stlfunnel::io
