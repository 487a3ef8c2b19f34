#include "stlfunnel/io/scenario_json.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>

#include "stlfunnel/error.hpp"
#include "stlfunnel/stl/parser.hpp"
#include "stlfunnel/stl/robustness.hpp"

namespace stlfunnel::io {

namespace {

using nlohmann::json;

[[noreturn]] void invalid(const std::string& path, const std::string& msg) {
  throw Error(ErrorCode::Validation, path + ": " + msg);
}

std::string at(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string at(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) invalid(path.empty() ? "<root>" : path, "expected an object");
  for (const auto& [key, value] : j.items()) {
    if (!key.empty() && key.front() == '_') continue;  // annotation
    bool ok = false;
    for (const char* a : allowed) ok = ok || key == a;
    if (!ok) invalid(at(path, key), "unknown field");
  }
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) invalid(path, "expected a number");
  double v = j.get<double>();
  if (!std::isfinite(v)) invalid(path, "must be finite");
  return v;
}

double number_or(const json& obj, const char* key, const std::string& path, double fallback) {
  if (!obj.contains(key)) return fallback;
  return number(obj.at(key), at(path, key));
}

int integer(const json& j, const std::string& path) {
  if (!j.is_number_integer()) invalid(path, "expected an integer");
  return j.get<int>();
}

Eigen::VectorXd vector(const json& j, const std::string& path) {
  if (!j.is_array()) invalid(path, "expected an array of numbers");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t k = 0; k < j.size(); ++k) v[static_cast<Eigen::Index>(k)] = number(j[k], at(path, k));
  return v;
}

std::vector<std::pair<stl::AgentId, stl::AgentId>> edges(const json& j, const std::string& path,
                                                          const std::set<stl::AgentId>& ids) {
  if (!j.is_array()) invalid(path, "expected an array of [a, b] pairs");
  std::vector<std::pair<stl::AgentId, stl::AgentId>> out;
  for (std::size_t k = 0; k < j.size(); ++k) {
    const std::string p = at(path, k);
    if (!j[k].is_array() || j[k].size() != 2) invalid(p, "expected [a, b]");
    int a = integer(j[k][0], at(p, 0));
    int b = integer(j[k][1], at(p, 1));
    if (!ids.count(a) || !ids.count(b)) invalid(p, "unknown agent");
    if (a == b) invalid(p, "self-loop");
    out.emplace_back(a, b);
  }
  return out;
}

world::DynamicsModel model(const json& j, const std::string& path) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) invalid(at(path, "type"), "missing model type");
  const std::string type = j.at("type").get<std::string>();
  if (type == "omni") {
    only_keys(j, path, {"type", "R", "L"});
    world::OmniRobot m;
    m.R = number_or(j, "R", path, m.R);
    m.L = number_or(j, "L", path, m.L);
    if (!(m.R > 0.0)) invalid(at(path, "R"), "must be positive");
    if (!(m.L > 0.0)) invalid(at(path, "L"), "must be positive");
    return m;
  }
  if (type == "single") {
    only_keys(j, path, {"type", "n"});
    world::SingleIntegrator m;
    if (j.contains("n")) m.n = integer(j.at("n"), at(path, "n"));
    if (m.n < 1) invalid(at(path, "n"), "must be at least 1");
    return m;
  }
  invalid(at(path, "type"), "unknown model '" + type + "' (expected omni or single)");
}

ControllerConfig controller(const json& j, const std::string& path) {
  only_keys(j, path,
            {"r", "rho_max_frac", "tstar_frac", "gamma0_scale", "gammaInf_frac", "zeta_u", "zeta_l", "delta",
             "sigma", "N", "eta_detect", "eps_max", "gain", "heading_gain", "idle", "relaxed"});
  ControllerConfig c;
  c.r = number_or(j, "r", path, c.r);
  c.rho_max_frac = number_or(j, "rho_max_frac", path, c.rho_max_frac);
  c.tstar_frac = number_or(j, "tstar_frac", path, c.tstar_frac);
  c.gamma0_scale = number_or(j, "gamma0_scale", path, c.gamma0_scale);
  c.gammaInf_frac = number_or(j, "gammaInf_frac", path, c.gammaInf_frac);
  if (j.contains("zeta_u")) c.zeta_u = number(j.at("zeta_u"), at(path, "zeta_u"));
  if (j.contains("zeta_l")) c.zeta_l = number(j.at("zeta_l"), at(path, "zeta_l"));
  c.delta = number_or(j, "delta", path, c.delta);
  c.sigma = number_or(j, "sigma", path, c.sigma);
  if (j.contains("N")) c.N = integer(j.at("N"), at(path, "N"));
  c.eta_detect = number_or(j, "eta_detect", path, c.eta_detect);
  c.eps_max = number_or(j, "eps_max", path, c.eps_max);
  c.gain = number_or(j, "gain", path, c.gain);
  c.heading_gain = number_or(j, "heading_gain", path, c.heading_gain);
  if (j.contains("idle")) {
    const json& v = j.at("idle");
    std::string s = v.is_string() ? v.get<std::string>() : "";
    if (s == "zero") {
      c.idle = IdlePolicy::Zero;
    } else if (s == "stabilizing") {
      c.idle = IdlePolicy::Stabilizing;
    } else {
      invalid(at(path, "idle"), "expected \"zero\" or \"stabilizing\"");
    }
  }
  if (j.contains("relaxed")) {
    if (!j.at("relaxed").is_boolean()) invalid(at(path, "relaxed"), "expected a boolean");
    c.relaxed = j.at("relaxed").get<bool>();
  }

  auto open_unit = [&](double v, const char* key) {
    if (!(v > 0.0 && v < 1.0)) invalid(at(path, key), "must lie in (0, 1)");
  };
  open_unit(c.rho_max_frac, "rho_max_frac");
  open_unit(c.gammaInf_frac, "gammaInf_frac");
  if (!(c.tstar_frac >= 0.0 && c.tstar_frac <= 1.0)) invalid(at(path, "tstar_frac"), "must lie in [0, 1]");
  if (!(c.gamma0_scale > 1.0)) invalid(at(path, "gamma0_scale"), "must exceed 1");
  if (c.zeta_u && !(*c.zeta_u > 0.0)) invalid(at(path, "zeta_u"), "must be positive");
  if (c.zeta_l && !(*c.zeta_l > 0.0)) invalid(at(path, "zeta_l"), "must be positive");
  if (!(c.delta > 0.0)) invalid(at(path, "delta"), "must be positive");
  if (!(c.sigma > 0.0)) invalid(at(path, "sigma"), "must be positive");
  if (c.N < 0) invalid(at(path, "N"), "must be non-negative");
  if (!(c.eta_detect > 0.0 && c.eta_detect < 0.5)) invalid(at(path, "eta_detect"), "must lie in (0, 0.5)");
  if (!(c.eps_max > 0.0)) invalid(at(path, "eps_max"), "must be positive");
  if (!(c.gain > 0.0)) invalid(at(path, "gain"), "must be positive");
  if (!(c.heading_gain > 0.0)) invalid(at(path, "heading_gain"), "must be positive");
  return c;
}

sim::SimConfig sim_config(const json& j, const std::string& path) {
  only_keys(j, path, {"dt", "t_end", "seed", "max_jumps_per_step"});
  sim::SimConfig s;
  s.dt = number_or(j, "dt", path, s.dt);
  s.t_end = number_or(j, "t_end", path, s.t_end);
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) invalid(at(path, "seed"), "expected a non-negative integer");
    s.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("max_jumps_per_step")) {
    s.max_jumps_per_step = integer(j.at("max_jumps_per_step"), at(path, "max_jumps_per_step"));
  }
  if (!(s.dt > 0.0)) invalid(at(path, "dt"), "must be positive");
  if (!(s.t_end >= 0.0)) invalid(at(path, "t_end"), "must be non-negative");
  if (s.max_jumps_per_step < 1) invalid(at(path, "max_jumps_per_step"), "must be at least 1");
  return s;
}

}  // namespace

sim::Scenario parse_scenario(std::string_view json_text, std::string name) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Parse, e.what());
  }
  only_keys(root, "", {"name", "agents", "tasks", "comm_edges", "coupling", "controller", "sim"});

  sim::Scenario sc;
  sc.name = std::move(name);
  if (root.contains("name")) {
    if (!root.at("name").is_string()) invalid("name", "expected a string");
    sc.name = root.at("name").get<std::string>();
  }

  if (!root.contains("agents") || !root.at("agents").is_array()) invalid("agents", "expected an array");
  std::set<stl::AgentId> ids;
  const json& agents = root.at("agents");
  for (std::size_t k = 0; k < agents.size(); ++k) {
    const std::string p = at("agents", k);
    only_keys(agents[k], p, {"id", "model", "x0", "u_max", "noise"});
    const json& a = agents[k];
    sim::AgentSpec spec;
    if (!a.contains("id")) invalid(at(p, "id"), "missing");
    spec.id = integer(a.at("id"), at(p, "id"));
    if (spec.id < 1) invalid(at(p, "id"), "ids start at 1");
    if (!ids.insert(spec.id).second) invalid(at(p, "id"), "duplicate agent id");
    if (!a.contains("model")) invalid(at(p, "model"), "missing");
    spec.model = model(a.at("model"), at(p, "model"));
    if (!a.contains("x0")) invalid(at(p, "x0"), "missing");
    spec.x0 = vector(a.at("x0"), at(p, "x0"));
    if (spec.x0.size() != world::state_dim(spec.model)) {
      invalid(at(p, "x0"), "expected " + std::to_string(world::state_dim(spec.model)) + " entries");
    }
    if (a.contains("u_max")) {
      spec.u_max = number(a.at("u_max"), at(p, "u_max"));
      if (!(spec.u_max > 0.0)) invalid(at(p, "u_max"), "must be positive");
    }
    if (a.contains("noise")) {
      spec.noise = vector(a.at("noise"), at(p, "noise"));
      if (spec.noise.size() != world::state_dim(spec.model)) invalid(at(p, "noise"), "one half-width per state");
      if ((spec.noise.array() < 0.0).any()) invalid(at(p, "noise"), "half-widths must be non-negative");
    }
    sc.agents.push_back(std::move(spec));
  }
  std::sort(sc.agents.begin(), sc.agents.end(), [](const auto& l, const auto& r) { return l.id < r.id; });
  stl::StateLayout layout;
  {
    std::vector<std::pair<stl::AgentId, int>> dims;
    for (const auto& a : sc.agents) dims.emplace_back(a.id, world::state_dim(a.model));
    layout = stl::StateLayout(dims);
  }

  if (root.contains("tasks")) {
    const json& tasks = root.at("tasks");
    if (!tasks.is_array()) invalid("tasks", "expected an array");
    std::set<stl::AgentId> owners;
    for (std::size_t k = 0; k < tasks.size(); ++k) {
      const std::string p = at("tasks", k);
      only_keys(tasks[k], p, {"agent", "formula"});
      sim::TaskSpec t;
      if (!tasks[k].contains("agent")) invalid(at(p, "agent"), "missing");
      t.agent = integer(tasks[k].at("agent"), at(p, "agent"));
      if (!ids.count(t.agent)) invalid(at(p, "agent"), "unknown agent " + std::to_string(t.agent));
      if (!owners.insert(t.agent).second) invalid(at(p, "agent"), "agent already has a task");
      if (!tasks[k].contains("formula") || !tasks[k].at("formula").is_string()) {
        invalid(at(p, "formula"), "expected a string");
      }
      t.formula = tasks[k].at("formula").get<std::string>();
      try {
        t.parsed = stl::parse_task(t.formula);
      } catch (const Error& e) {
        throw Error(ErrorCode::Parse, at(p, "formula") + ": " + e.what());
      }
      for (stl::AgentId j : stl::participants(t.parsed, t.agent)) {
        if (!ids.count(j)) invalid(at(p, "formula"), "references unknown agent " + std::to_string(j));
      }
      try {
        for (const auto& u : t.parsed.units) stl::compile(u.body, layout);
      } catch (const Error& e) {
        invalid(at(p, "formula"), e.what());
      }
      sc.tasks.push_back(std::move(t));
    }
  }

  if (root.contains("comm_edges")) sc.comm_edges = edges(root.at("comm_edges"), "comm_edges", ids);

  if (root.contains("coupling")) {
    const json& c = root.at("coupling");
    const std::string type = c.is_object() && c.contains("type") && c.at("type").is_string()
                                 ? c.at("type").get<std::string>()
                                 : std::string();
    if (type == "none") {
      only_keys(c, "coupling", {"type"});
    } else if (type == "consensus") {
      only_keys(c, "coupling", {"type", "gain", "bound", "edges"});
      world::SaturatedConsensus s;
      s.gain = number_or(c, "gain", "coupling", 0.0);
      s.bound = number_or(c, "bound", "coupling", 0.0);
      if (!(s.bound >= 0.0)) invalid("coupling.bound", "must be non-negative");
      if (c.contains("edges")) s.edges = edges(c.at("edges"), "coupling.edges", ids);
      for (const auto& [a, b] : s.edges) {
        if (layout.slot(a).dim != layout.slot(b).dim) invalid("coupling.edges", "agents differ in dimension");
      }
      sc.coupling = s;
    } else {
      invalid("coupling.type", "expected \"none\" or \"consensus\"");
    }
  }

  if (root.contains("controller")) sc.controller = controller(root.at("controller"), "controller");
  if (root.contains("sim")) sc.sim = sim_config(root.at("sim"), "sim");
  return sc;
}

sim::Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario(buf.str(), path.stem().string());
}

}  // namespace stlfunnel::io
