#include "stlfunnel/hybrid/hybrid.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "stlfunnel/topology/topology.hpp"

namespace stlfunnel::hybrid {

const char* to_string(JumpType type) {
  switch (type) {
    case JumpType::Stage1: return "Stage1";
    case JumpType::Stage2Initiate: return "Stage2Initiate";
    case JumpType::Stage2Join: return "Stage2Join";
    case JumpType::Stage3: return "Stage3";
    case JumpType::Satisfied: return "Satisfied";
  }
  return "Unknown";
}

std::string to_string(const JumpKind& kind) {
  std::string s = to_string(kind.type);
  switch (kind.type) {
    case JumpType::Stage2Join: return s + "(" + std::to_string(kind.initiator) + ")";
    case JumpType::Satisfied: return s;
    default: return s + "(" + stlfunnel::to_string(kind.side) + ")";
  }
}

std::size_t Team::index_of(AgentId id) const {
  for (std::size_t k = 0; k < tasks.size(); ++k) {
    if (tasks[k].id == id) return k;
  }
  throw Error(ErrorCode::Validation, "agent " + std::to_string(id) + " is not part of the team");
}

AgentTask prepare_task(AgentId id, const stl::TaskFormula& task, const stl::StateLayout& layout,
                       const stl::OptimizeOptions& opt) {
  AgentTask out;
  out.id = id;
  out.task = task;
  for (const auto& u : task.units) {
    out.psi.push_back(stl::compile(u.body, layout));
    out.rho_opt.push_back(stl::rho_opt(out.psi.back(), opt).value);
    out.participants.push_back(stl::participants(u, id));
  }
  return out;
}

std::size_t next_pending_unit(const AgentTask& task, std::size_t from) {
  while (from < task.psi.size() && task.psi[from].trivial()) ++from;
  return from;
}

HybridState initial_state(const AgentTask& task, const Eigen::VectorXd& x, const ControllerConfig& cfg) {
  HybridState z;
  z.id = task.id;
  z.unit_index = next_pending_unit(task, 0);
  if (z.unit_index >= task.psi.size()) {
    z.repair.collab = kFree;
    return z;
  }
  double rho0 = stl::smooth_robustness(task.psi[z.unit_index], x);
  z.funnel = funnel::select_initial_params(task.task.units[z.unit_index], rho0, task.rho_opt[z.unit_index], cfg);
  return z;
}

std::optional<Objective> active_objective(const Team& team, std::size_t k) {
  const HybridState& z = team.states[k];
  const int c = z.repair.collab;
  if (c == kFree) return std::nullopt;
  Objective o;
  if (c == kOwnTask || c == z.id) {
    o.owner = &team.tasks[k];
    o.unit = z.unit_index;
  } else {
    o.owner = &team.tasks[team.index_of(c)];
    o.unit = z.repair.collab_unit;
  }
  if (o.unit >= o.owner->psi.size()) return std::nullopt;
  o.psi = &o.owner->psi[o.unit];
  o.phi = &o.owner->task.units[o.unit];
  o.rho_opt = o.owner->rho_opt[o.unit];
  return o;
}

namespace {

bool in_window(const stl::PhiFormula& phi, double t, double dt) {
  if (phi.op == stl::TemporalOp::Eventually) {
    return t >= phi.a - stl::kWindowTol && t <= phi.b + stl::kWindowTol;
  }
  return std::abs(t - phi.b) <= dt + stl::kWindowTol;
}

bool participates(const AgentTask& task, std::size_t unit, AgentId id) {
  if (unit >= task.participants.size()) return false;
  const auto& p = task.participants[unit];
  return std::find(p.begin(), p.end(), id) != p.end();
}

// gamma rebuild with the fallbacks for a closed time window.
funnel::GammaParams rebuild_gamma(double gamma_r, double rho_max_hat, double r_hat, double rho, double t,
                                  double t_star_hat, const ControllerConfig& cfg) {
  const bool needs_decay = -gamma_r + rho_max_hat < r_hat;
  if (needs_decay && !(t_star_hat > t)) {
    if (rho > r_hat) {
      gamma_r = rho_max_hat - r_hat;
    } else {
      funnel::GammaParams g;
      g.gamma0 = gamma_r;
      g.gammaInf = cfg.gammaInf_frac * gamma_r;
      g.l = 0.0;
      return g;
    }
  }
  return funnel::recompute_gamma(gamma_r, rho_max_hat, r_hat, t, t_star_hat, cfg);
}

double zeta_u(const funnel::FunnelParams& fp, double rho_opt, const ControllerConfig& cfg) {
  double gap = rho_opt - fp.rho_max;
  if (!(gap > 0.0)) return 0.0;
  return std::min(cfg.zeta_u.value_or(0.5 * gap), 0.9 * gap);
}

// Stage 1 and Stage 2 relaxation: widen both boundaries, lower r.
funnel::FunnelParams relax(const funnel::FunnelParams& fp, const stl::PhiFormula& phi, double rho,
                           double rho_opt, double t, const ControllerConfig& cfg) {
  funnel::FunnelParams out = fp;
  out.t_star = phi.op == stl::TemporalOp::Eventually ? phi.b : fp.t_star;
  out.rho_max = fp.rho_max + zeta_u(fp, rho_opt, cfg);
  out.r = fp.r > 0.0 ? 0.5 * fp.r : fp.r;
  double zl = cfg.zeta_l.value_or(0.1 * funnel::gamma_eval(fp.gamma, t));
  if (!(out.t_star > t) && rho - out.r > 0.0) zl = std::min(zl, rho - out.r);
  double gamma_r = out.rho_max - rho + zl;
  out.gamma = rebuild_gamma(gamma_r, out.rho_max, out.r, rho, t, out.t_star, cfg);
  return out;
}

funnel::FunnelParams stage3(const funnel::FunnelParams& fp, Side side, double rho, double rho_opt, double t,
                            const ControllerConfig& cfg) {
  funnel::FunnelParams out = fp;
  out.rho_max = rho_opt + cfg.sigma;
  double gamma_r;
  if (side == Side::Lower) {
    out.r = fp.r - cfg.delta;
    gamma_r = out.rho_max - rho + cfg.delta;
  } else {
    // Keep the current floor so the lower guarantee is untouched.
    gamma_r = out.rho_max - funnel::lower_bound(fp, t);
  }
  out.gamma = rebuild_gamma(gamma_r, out.rho_max, out.r, rho, t, out.t_star, cfg);
  return out;
}

funnel::FunnelParams after_satisfaction(const stl::PhiFormula& phi, double rho, double rho_opt, double t,
                                        const ControllerConfig& cfg) {
  try {
    return funnel::post_sat_params(phi, rho, rho_opt, t, cfg);
  } catch (const Error&) {
    ControllerConfig relaxed = cfg;
    relaxed.relaxed = true;
    return funnel::post_sat_params(phi, rho, rho_opt, t, relaxed);
  }
}

}  // namespace

JumpSets memberships(const Team& team, const Eigen::VectorXd& x, std::size_t k) {
  JumpSets m;
  const HybridState& z = team.states[k];
  const AgentTask& own = team.tasks[k];
  const int c = z.repair.collab;
  const double t = z.clock;

  if (c == kFree || c == kOwnTask) {
    for (std::size_t j = 0; j < team.states.size(); ++j) {
      if (j == k || team.cluster[j] != team.cluster[k]) continue;
      const HybridState& zj = team.states[j];
      if (zj.repair.collab == zj.id && participates(team.tasks[j], zj.unit_index, z.id)) {
        m.join = zj.id;
        break;
      }
    }
  }

  if (c == kOwnTask && z.unit_index < own.psi.size()) {
    double rho = stl::smooth_robustness(own.psi[z.unit_index], x);
    m.exit = funnel::exit_side(funnel::normalized_error(rho, z.funnel, t), team.cfg.eta_detect);
    if (m.exit) {
      const stl::PhiFormula& phi = own.task.units[z.unit_index];
      if (z.repair.n_repairs < team.cfg.N) {
        m.stage1 = true;
      } else {
        std::map<AgentId, topology::AgentStatus> status;
        for (std::size_t j = 0; j < team.states.size(); ++j) {
          const HybridState& zj = team.states[j];
          topology::AgentStatus s;
          s.collab = zj.repair.collab;
          if (zj.unit_index < team.tasks[j].task.units.size()) s.active = &team.tasks[j].task.units[zj.unit_index];
          status[zj.id] = s;
        }
        if (topology::stage2_timing_ok(z.id, phi, status)) {
          m.stage2 = true;
        } else {
          m.stage3 = true;
        }
      }
    }
  }

  if (c >= 0 && !m.exit && !m.join) {
    if (auto obj = active_objective(team, k)) {
      double rho = stl::smooth_robustness(*obj->psi, x);
      m.satisfied = z.funnel.r <= rho && rho <= z.funnel.rho_max && in_window(*obj->phi, t, team.dt);
    }
  }
  return m;
}

std::optional<JumpKind> detect(const Team& team, const Eigen::VectorXd& x, std::size_t k) {
  JumpSets m = memberships(team, x, k);
  if (m.join) return JumpKind{JumpType::Stage2Join, *m.join, Side::Lower};
  if (m.exit) {
    JumpType type = m.stage1 ? JumpType::Stage1 : m.stage2 ? JumpType::Stage2Initiate : JumpType::Stage3;
    return JumpKind{type, 0, *m.exit};
  }
  if (m.satisfied) return JumpKind{JumpType::Satisfied, 0, Side::Lower};
  return std::nullopt;
}

HybridState jump(const Team& team, const Eigen::VectorXd& x, std::size_t k, const JumpKind& kind) {
  const HybridState& z = team.states[k];
  const AgentTask& own = team.tasks[k];
  const ControllerConfig& cfg = team.cfg;
  const double t = z.clock;
  HybridState out = z;

  auto own_rho = [&](std::size_t unit) { return stl::smooth_robustness(own.psi[unit], x); };

  switch (kind.type) {
    case JumpType::Stage1:
    case JumpType::Stage2Initiate: {
      const std::size_t u = z.unit_index;
      out.funnel = relax(z.funnel, own.task.units[u], own_rho(u), own.rho_opt[u], t, cfg);
      if (kind.type == JumpType::Stage1) {
        ++out.repair.n_repairs;
      } else {
        out.repair.collab = z.id;
        out.repair.collab_unit = u;
      }
      break;
    }
    case JumpType::Stage2Join: {
      const HybridState& zi = team.states[team.index_of(kind.initiator)];
      out.funnel = zi.funnel;
      out.repair.collab = zi.repair.collab;
      out.repair.collab_unit = zi.unit_index;
      break;
    }
    case JumpType::Stage3: {
      const std::size_t u = z.unit_index;
      out.funnel = stage3(z.funnel, kind.side, own_rho(u), own.rho_opt[u], t, cfg);
      break;
    }
    case JumpType::Satisfied: {
      const int c = z.repair.collab;
      if (c == kOwnTask || c == z.id) {
        const std::size_t done = z.unit_index;
        out.unit_index = next_pending_unit(own, done + 1);
        if (out.unit_index < own.psi.size()) {
          const std::size_t u = out.unit_index;
          out.funnel = after_satisfaction(own.task.units[u], own_rho(u), own.rho_opt[u], t, cfg);
          out.repair.collab = kOwnTask;
        } else {
          out.funnel = after_satisfaction(own.task.units[done], own_rho(done), own.rho_opt[done], t, cfg);
          out.repair.collab = kFree;
        }
      } else {
        const std::size_t u = next_pending_unit(own, z.unit_index);
        out.unit_index = u;
        if (u < own.psi.size()) {
          out.funnel = after_satisfaction(own.task.units[u], own_rho(u), own.rho_opt[u], t, cfg);
          out.repair.collab = kOwnTask;
        } else {
          out.repair.collab = kFree;
        }
      }
      out.repair.collab_unit = 0;
      break;
    }
  }
  return out;
}

std::optional<stl::PhiFormula> advance_theta(const AgentTask& task, const HybridState& z) {
  std::size_t u = next_pending_unit(task, z.unit_index + 1);
  if (u >= task.task.units.size()) return std::nullopt;
  return task.task.units[u];
}

std::size_t jump_bound(const ControllerConfig& cfg, double r0, double rho_bound, std::size_t units) {
  double steps = std::ceil(std::max(0.0, r0 + rho_bound) / cfg.delta);
  return static_cast<std::size_t>(cfg.N) + 1 + static_cast<std::size_t>(steps) + 1 + units;
}

}  // namespace stlfunnel::hybrid
