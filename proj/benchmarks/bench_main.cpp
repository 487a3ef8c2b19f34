#include <benchmark/benchmark.h>

#include <filesystem>
#include <random>

#include "stlfunnel/io/scenario_json.hpp"
#include "stlfunnel/sim/simulator.hpp"
#include "stlfunnel/stl/optimize.hpp"
#include "stlfunnel/stl/parser.hpp"
#include "stlfunnel/stl/robustness.hpp"

using namespace stlfunnel;

namespace {

const std::filesystem::path kScenarios = STLFUNNEL_SCENARIO_DIR;

// Conjunction of pairwise balls over n planar agents, all pairs.
stl::CompiledPsi pairwise(int n, stl::StateLayout& layout) {
  std::vector<std::pair<stl::AgentId, int>> dims;
  std::string body;
  for (int i = 1; i <= n; ++i) {
    dims.emplace_back(i, 2);
    for (int j = i + 1; j <= n; ++j) {
      body += (body.empty() ? "" : " && ") + std::string("dist(") + std::to_string(i) + "," + std::to_string(j) +
              ") <= 3";
    }
  }
  layout = stl::StateLayout(dims);
  return stl::compile(stl::parse_phi("F[0,1] (" + body + ")").body, layout);
}

void BM_SmoothGradient(benchmark::State& state) {
  stl::StateLayout layout;
  auto psi = pairwise(static_cast<int>(state.range(0)), layout);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  Eigen::VectorXd x(layout.size());
  for (int k = 0; k < x.size(); ++k) x[k] = u(rng);
  for (auto _ : state) benchmark::DoNotOptimize(stl::smooth_gradient(psi, x));
  state.counters["atoms"] = static_cast<double>(psi.constraints.size());
}
BENCHMARK(BM_SmoothGradient)->Arg(3)->Arg(8)->Arg(16);

void BM_RhoOpt(benchmark::State& state) {
  stl::StateLayout layout;
  auto psi = pairwise(static_cast<int>(state.range(0)), layout);
  for (auto _ : state) benchmark::DoNotOptimize(stl::rho_opt(psi));
}
BENCHMARK(BM_RhoOpt)->Arg(3)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_Rk4Step(benchmark::State& state) {
  auto sc = io::load_scenario(kScenarios / "scenario1.json");
  auto layout = sim::layout_of(sc);
  Eigen::VectorXd x(layout.size());
  std::vector<Eigen::VectorXd> u, w;
  for (const auto& a : sc.agents) {
    x.segment(layout.slot(a.id).offset, a.x0.size()) = a.x0;
    u.push_back(Eigen::VectorXd::Ones(world::input_dim(a.model)));
    w.emplace_back();
  }
  for (auto _ : state) benchmark::DoNotOptimize(sim::rk4_step(sc, layout, x, u, w, sc.sim.dt));
}
BENCHMARK(BM_Rk4Step);

void BM_Scenario(benchmark::State& state, const char* file) {
  auto sc = io::load_scenario(kScenarios / file);
  for (auto _ : state) benchmark::DoNotOptimize(sim::run(sc));
}
BENCHMARK_CAPTURE(BM_Scenario, scenario1, "scenario1.json")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Scenario, scenario2, "scenario2.json")->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
