#include "stlfunnel/sim/simulator.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

#include "stlfunnel/control/controller.hpp"
#include "stlfunnel/error.hpp"
#include "stlfunnel/stl/parser.hpp"

namespace stlfunnel::sim {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::VectorXd derivative(const Scenario& sc, const stl::StateLayout& layout, const Eigen::VectorXd& x,
                           const std::vector<Eigen::VectorXd>& u, const std::vector<Eigen::VectorXd>& w) {
  Eigen::VectorXd dx(x.size());
  for (std::size_t k = 0; k < sc.agents.size(); ++k) {
    const auto& a = sc.agents[k];
    const auto& s = layout.slot(a.id);
    Eigen::VectorXd xi = x.segment(s.offset, s.dim);
    Eigen::VectorXd rate = world::drift(a.model, xi) + world::coupling(sc.coupling, layout, x, a.id) +
                           world::actuation(a.model, xi) * u[k];
    if (w[k].size()) rate += w[k];
    dx.segment(s.offset, s.dim) = rate;
  }
  return dx;
}

struct Stepper {
  const Scenario& sc;
  const stl::StateLayout& layout;
  hybrid::Team team;
  Eigen::VectorXd x;
  RunResult result;
  std::size_t jump_count = 0;
  std::vector<std::optional<double>> r_pursued;

  Stepper(const Scenario& s, const stl::StateLayout& l) : sc(s), layout(l) {}

  bool jump_pass(double t) {
    bool any = false;
    for (std::size_t k = 0; k < team.states.size(); ++k) {
      auto kind = hybrid::detect(team, x, k);
      if (!kind) continue;
      any = true;
      JumpEvent ev;
      ev.t = t;
      ev.jump_index = jump_count++;
      ev.agent = team.states[k].id;
      ev.kind = *kind;
      ev.before = team.states[k];
      ev.after = hybrid::jump(team, x, k, *kind);
      if (kind->type == hybrid::JumpType::Satisfied && ev.after.repair.collab == hybrid::kFree &&
          (ev.before.repair.collab == hybrid::kOwnTask || ev.before.repair.collab == ev.agent)) {
        r_pursued[k] = ev.before.funnel.r;
      }
      team.states[k] = ev.after;
      result.events.push_back(std::move(ev));
    }
    return any;
  }

  void jumps(double t) {
    const int max_passes = std::max(1, sc.sim.max_jumps_per_step);
    for (int pass = 0;; ++pass) {
      if (!jump_pass(t)) return;
      if (pass + 1 >= max_passes) {
        for (std::size_t k = 0; k < team.states.size(); ++k) {
          if (hybrid::detect(team, x, k)) {
            throw Error(ErrorCode::JumpStorm, "agent " + std::to_string(team.states[k].id) +
                                                  " still jumping after " + std::to_string(max_passes) +
                                                  " passes at t = " + std::to_string(t));
          }
        }
        return;
      }
    }
  }

  std::vector<AgentSample> controls(double t) {
    std::vector<AgentSample> out(sc.agents.size());
    for (std::size_t k = 0; k < sc.agents.size(); ++k) {
      const auto& a = sc.agents[k];
      const auto& s = layout.slot(a.id);
      const auto& z = team.states[k];
      AgentSample& smp = out[k];
      smp.x = x.segment(s.offset, s.dim);
      smp.n_repairs = z.repair.n_repairs;
      smp.collab = z.repair.collab;
      smp.unit_index = z.unit_index;

      auto obj = hybrid::active_objective(team, k);
      if (!obj) {
        smp.u = control::idle_control(a.model, smp.x, sc.controller.idle);
        smp.rho_psi = smp.rho_max = smp.funnel_lo = smp.xi = smp.eps = kNaN;
        continue;
      }
      control::ControlContext ctx;
      ctx.agent = a.id;
      ctx.model = &a.model;
      ctx.layout = &layout;
      ctx.x = &x;
      ctx.t = t;
      ctx.psi = obj->psi;
      ctx.params = z.funnel;
      ctx.u_max = a.u_max;
      ctx.cfg = &sc.controller;

      control::ControlOutput c;
      const int collab = z.repair.collab;
      if (collab > 0 && collab != a.id) {
        const auto& zi = team.states[team.index_of(collab)];
        if (zi.repair.collab == collab) {
          c = control::collaborative_control(ctx, zi.funnel, control::ExitPolicy::Saturate);
        } else {
          c = control::ppc_control(ctx, control::ExitPolicy::Saturate);
        }
      } else {
        c = control::ppc_control(ctx, control::ExitPolicy::Saturate);
      }
      smp.u = c.u;
      smp.rho_psi = c.rho;
      smp.rho_max = z.funnel.rho_max;
      smp.funnel_lo = funnel::lower_bound(z.funnel, t);
      smp.xi = c.xi;
      smp.eps = c.eps;
      smp.singular = c.singular;
    }
    return out;
  }
};

}  // namespace

stl::StateLayout layout_of(const Scenario& scenario) {
  std::vector<std::pair<AgentId, int>> dims;
  for (const auto& a : scenario.agents) dims.emplace_back(a.id, world::state_dim(a.model));
  return stl::StateLayout(dims);
}

std::map<AgentId, stl::TaskFormula> tasks_of(const Scenario& scenario) {
  std::map<AgentId, stl::TaskFormula> out;
  for (const auto& a : scenario.agents) out[a.id] = stl::TaskFormula{};
  for (const auto& t : scenario.tasks) out[t.agent] = t.parsed;
  return out;
}

Eigen::VectorXd rk4_step(const Scenario& scenario, const stl::StateLayout& layout, const Eigen::VectorXd& x,
                         const std::vector<Eigen::VectorXd>& u, const std::vector<Eigen::VectorXd>& w, double dt) {
  Eigen::VectorXd k1 = derivative(scenario, layout, x, u, w);
  Eigen::VectorXd k2 = derivative(scenario, layout, x + 0.5 * dt * k1, u, w);
  Eigen::VectorXd k3 = derivative(scenario, layout, x + 0.5 * dt * k2, u, w);
  Eigen::VectorXd k4 = derivative(scenario, layout, x + dt * k3, u, w);
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

stl::Trace trace_of(const TrajectoryLog& log) {
  stl::Trace tr;
  tr.t = log.t;
  for (const auto& row : log.samples) {
    int n = 0;
    for (const auto& s : row) n += static_cast<int>(s.x.size());
    Eigen::VectorXd x(n);
    int off = 0;
    for (const auto& s : row) {
      x.segment(off, s.x.size()) = s.x;
      off += static_cast<int>(s.x.size());
    }
    tr.x.push_back(std::move(x));
  }
  return tr;
}

RunResult run(const Scenario& sc) {
  if (!(sc.sim.dt > 0.0) || !(sc.sim.t_end >= 0.0)) {
    throw Error(ErrorCode::Validation, "sim.dt must be positive and sim.t_end non-negative");
  }
  const stl::StateLayout layout = layout_of(sc);
  Stepper st(sc, layout);
  RunResult& res = st.result;
  auto tasks = tasks_of(sc);
  res.summary.scenario = sc.name;
  res.summary.relaxed = sc.controller.relaxed;
  res.summary.clusters = topology::clusters(tasks, sc.comm_edges ? topology::CommGraph(*sc.comm_edges)
                                                                  : topology::CommGraph{});

  st.x = Eigen::VectorXd(layout.size());
  for (const auto& a : sc.agents) {
    const auto& s = layout.slot(a.id);
    if (a.x0.size() != s.dim) {
      throw Error(ErrorCode::DimensionMismatch, "agent " + std::to_string(a.id) + " x0 has wrong size");
    }
    st.x.segment(s.offset, s.dim) = a.x0;
  }

  st.team.layout = &layout;
  st.team.cfg = sc.controller;
  st.team.dt = sc.sim.dt;
  for (const auto& a : sc.agents) {
    st.team.tasks.push_back(hybrid::prepare_task(a.id, tasks.at(a.id), layout));
    st.team.states.push_back(hybrid::initial_state(st.team.tasks.back(), st.x, sc.controller));
    st.team.cluster.push_back(res.summary.clusters.cluster_of(a.id));
  }
  st.r_pursued.assign(sc.agents.size(), std::nullopt);
  std::vector<double> r_initial;
  for (const auto& z : st.team.states) r_initial.push_back(z.funnel.r);

  const auto steps = static_cast<std::size_t>(std::llround(sc.sim.t_end / sc.sim.dt));
  res.summary.steps = steps;
  res.trajectory.agents.clear();
  for (const auto& a : sc.agents) res.trajectory.agents.push_back(a.id);

  for (std::size_t k = 0; k <= steps; ++k) {
    const double t = static_cast<double>(k) * sc.sim.dt;
    for (auto& z : st.team.states) z.clock = t;
    st.jumps(t);
    std::vector<AgentSample> row = st.controls(t);

    if (k < steps) {
      std::vector<Eigen::VectorXd> u;
      std::vector<Eigen::VectorXd> w;
      for (std::size_t i = 0; i < sc.agents.size(); ++i) {
        u.push_back(row[i].u);
        const auto& a = sc.agents[i];
        w.push_back(a.noise.size() ? world::sample_noise(a.noise, sc.sim.seed, k, a.id) : Eigen::VectorXd());
      }
      st.x = rk4_step(sc, layout, st.x, u, w, sc.sim.dt);
      if (!st.x.allFinite()) {
        throw Error(ErrorCode::NonFiniteState, "state diverged at t = " + std::to_string(t));
      }
    }
    res.trajectory.t.push_back(t);
    res.trajectory.samples.push_back(std::move(row));
  }

  stl::Trace trace = trace_of(res.trajectory);
  for (std::size_t i = 0; i < sc.agents.size(); ++i) {
    const auto& a = sc.agents[i];
    AgentSummary s;
    s.id = a.id;
    s.formula = stl::to_string(tasks.at(a.id));
    s.r_initial = r_initial[i];
    s.r_final = st.team.states[i].funnel.r;
    s.r_pursued = st.r_pursued[i].value_or(s.r_final);
    double min_rho = std::numeric_limits<double>::infinity();
    for (const auto& row : res.trajectory.samples) {
      if (std::isfinite(row[i].rho_psi)) min_rho = std::min(min_rho, row[i].rho_psi);
    }
    s.min_rho = std::isfinite(min_rho) ? min_rho : 0.0;
    for (const auto& ev : res.events) {
      if (ev.agent != a.id) continue;
      ++s.jumps[hybrid::to_string(ev.kind.type)];
      ++s.total_jumps;
      if (ev.kind.type == hybrid::JumpType::Satisfied && ev.after.repair.collab == hybrid::kFree &&
          (ev.before.repair.collab == hybrid::kOwnTask || ev.before.repair.collab == a.id)) {
        s.satisfied_at = ev.t;
      }
    }
    const auto& task = tasks.at(a.id);
    s.jump_bound = hybrid::jump_bound(sc.controller, s.r_initial, std::max(0.0, -s.min_rho), task.units.size());

    bool covered = true;
    double task_rho = std::numeric_limits<double>::infinity();
    for (const auto& u : task.units) {
      try {
        double v = stl::trace_robustness(u, layout, trace, 0.0);
        s.unit_robustness.push_back(v);
        task_rho = std::min(task_rho, v);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::WindowNotCovered) throw;
        s.unit_robustness.push_back(std::nullopt);
        covered = false;
      }
    }
    if (covered) s.task_robustness = task_rho;
    s.satisfied = covered && task_rho > 0.0;
    res.summary.agents.push_back(std::move(s));
  }
  res.summary.total_jumps = res.events.size();
  return res;
}

}  // namespace stlfunnel::sim
