#include "stlfunnel_cli/commands.hpp"

#include <CLI11.hpp>
#include <cstdio>
#include <iostream>

#include "stlfunnel/error.hpp"
#include "stlfunnel/hybrid/hybrid.hpp"
#include "stlfunnel/io/logs.hpp"
#include "stlfunnel/io/scenario_json.hpp"
#include "stlfunnel/io/trace_csv.hpp"
#include "stlfunnel/sim/simulator.hpp"
#include "stlfunnel/stl/parser.hpp"
#include "stlfunnel/topology/topology.hpp"

namespace stlfunnel::cli {

namespace {

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

std::string ids(const std::vector<stl::AgentId>& v) {
  std::string s;
  for (auto id : v) s += (s.empty() ? "" : ",") + std::to_string(id);
  return "{" + s + "}";
}

}  // namespace

int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    sim::Scenario sc = io::load_scenario(opt.scenario);
    if (opt.seed) sc.sim.seed = *opt.seed;
    if (opt.dt) {
      if (!(*opt.dt > 0.0)) throw Error(ErrorCode::Validation, "--dt must be positive");
      sc.sim.dt = *opt.dt;
    }
    sim::RunResult res = sim::run(sc);
    auto paths = io::write_run(opt.out, res);

    bool all = true;
    for (const auto& a : res.summary.agents) {
      all = all && a.satisfied;
      out << "agent " << a.id << ": " << (a.satisfied ? "satisfied" : "violated");
      if (a.task_robustness) out << "  rho = " << fmt(*a.task_robustness);
      out << "  r = " << fmt(a.r_final) << "  jumps = " << a.total_jumps << '\n';
    }
    out << "wrote " << paths.trajectory.string() << ", " << paths.events.string() << ", "
        << paths.summary.string() << '\n';
    return (all || res.summary.relaxed) ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int cmd_check(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err) {
  sim::Scenario sc;
  try {
    sc = io::load_scenario(scenario);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  const auto layout = sim::layout_of(sc);
  const auto tasks = sim::tasks_of(sc);
  Eigen::VectorXd x0(layout.size());
  for (const auto& a : sc.agents) x0.segment(layout.slot(a.id).offset, a.x0.size()) = a.x0;

  int code = 0;
  for (const auto& [id, task] : tasks) {
    out << "agent " << id << ": " << stl::to_string(task) << '\n';
    try {
      auto prepared = hybrid::prepare_task(id, task, layout);
      for (std::size_t u = 0; u < task.units.size(); ++u) {
        out << "  unit " << u << ": rho_opt = " << fmt(prepared.rho_opt[u])
            << "  rho(x0) = " << fmt(stl::smooth_robustness(prepared.psi[u], x0)) << '\n';
      }
      auto z = hybrid::initial_state(prepared, x0, sc.controller);
      if (z.repair.collab != hybrid::kFree) {
        const auto& f = z.funnel;
        out << "  funnel: t* = " << fmt(f.t_star) << "  rho_max = " << fmt(f.rho_max) << "  r = " << fmt(f.r)
            << "  gamma0 = " << fmt(f.gamma.gamma0) << "  gammaInf = " << fmt(f.gamma.gammaInf)
            << "  l = " << fmt(f.gamma.l) << '\n';
      }
    } catch (const Error& e) {
      err << "agent " << id << ": " << to_string(e.code()) << ": " << e.what() << '\n';
      code = 2;
    }
  }

  auto part = topology::clusters(tasks, sc.comm_edges ? topology::CommGraph(*sc.comm_edges) : topology::CommGraph{});
  for (const auto& c : part.clusters) {
    out << "cluster " << ids(c.agents) << (c.case_a ? "" : "  [mixed tasks]") << (c.comm_ok ? "" : "  [disconnected]")
        << '\n';
    if (!c.case_a) {
      err << "warning: cluster " << ids(c.agents)
          << " mixes task structures; local feasibility is not guaranteed, the repair scheme will govern\n";
    }
    if (!c.comm_ok) err << "warning: cluster " << ids(c.agents) << " is not connected in the communication graph\n";
  }
  return code;
}

int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err) {
  try {
    auto loaded = io::read_trace_csv(opt.trace);
    auto task = stl::parse_task(opt.formula);
    double v = stl::trace_robustness(task, loaded.layout, loaded.trace, opt.t0);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    out << buf << ' ' << (v > 0.0 ? "satisfied" : "violated") << '\n';
    return v > 0.0 ? 0 : 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
}

int main(int argc, char** argv) {
  CLI::App app{"Multi-agent STL funnel-control simulator"};
  app.require_subcommand(1);

  RunOptions run;
  auto* run_cmd = app.add_subcommand("run", "Simulate a scenario and write traj.csv, events.jsonl, summary.json");
  run_cmd->add_option("scenario", run.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", run.out, "Output directory")->capture_default_str();
  run_cmd->add_option("--seed", run.seed, "Noise seed");
  run_cmd->add_option("--dt", run.dt, "Integration step");

  std::filesystem::path check;
  auto* check_cmd = app.add_subcommand("check", "Validate a scenario and report initial funnels");
  check_cmd->add_option("scenario", check, "Scenario JSON")->required()->check(CLI::ExistingFile);

  EvalOptions eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a formula's robustness on a stored trajectory");
  eval_cmd->add_option("--trace", eval.trace, "Trajectory CSV")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--formula", eval.formula, "Task formula")->required();
  eval_cmd->add_option("--t0", eval.t0, "Evaluation time")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  if (*run_cmd) return cmd_run(run, std::cout, std::cerr);
  if (*check_cmd) return cmd_check(check, std::cout, std::cerr);
  return cmd_eval(eval, std::cout, std::cerr);
}

}  // namespace stlfunnel::cli
