#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "stlfunnel/error.hpp"
#include "stlfunnel/io/logs.hpp"
#include "stlfunnel/io/scenario_json.hpp"
#include "stlfunnel/io/trace_csv.hpp"
#include "stlfunnel/sim/simulator.hpp"
#include "stlfunnel_cli/commands.hpp"

using namespace stlfunnel;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarios = STLFUNNEL_SCENARIO_DIR;

const char* kMinimal = R"({
  "agents": [{"id": 1, "model": {"type": "single", "n": 2}, "x0": [0, 0]},
             {"id": 2, "model": {"type": "single", "n": 2}, "x0": [4, 0]}],
  "tasks": [{"agent": 1, "formula": "F[1,3] dist(1,[2,2]) <= 1"}],
  "sim": {"dt": 0.01, "t_end": 3.5}
})";

ErrorCode parse_code(const std::string& text, std::string* what = nullptr) {
  try {
    io::parse_scenario(text);
  } catch (const Error& e) {
    if (what) *what = e.what();
    return e.code();
  }
  ADD_FAILURE() << "accepted: " << text;
  return ErrorCode::Io;
}

std::string patched(const std::string& key, const std::string& value) {
  auto j = nlohmann::json::parse(kMinimal);
  j["controller"][key] = nlohmann::json::parse(value);
  return j.dump();
}

fs::path temp_dir(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("stlfunnel_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

fs::path write_file(const fs::path& dir, const std::string& name, const std::string& text) {
  fs::path p = dir / name;
  std::ofstream(p) << text;
  return p;
}

}  // namespace

TEST(ScenarioJson, ShippedScenarioOne) {
  auto sc = io::load_scenario(kScenarios / "scenario1.json");
  EXPECT_EQ(sc.agents.size(), 8u);
  EXPECT_EQ(sc.tasks.size(), 8u);
  auto part = topology::clusters(sim::tasks_of(sc));
  ASSERT_EQ(part.clusters.size(), 3u);
  for (const auto& c : part.clusters) EXPECT_TRUE(c.case_a);
  EXPECT_EQ(sc.sim.dt, 0.005);
}

TEST(ScenarioJson, Minimal) {
  auto sc = io::parse_scenario(kMinimal, "m");
  EXPECT_EQ(sc.name, "m");
  ASSERT_EQ(sc.agents.size(), 2u);
  EXPECT_EQ(sc.agents[1].x0[0], 4.0);
  auto tasks = sim::tasks_of(sc);
  EXPECT_EQ(tasks.at(2).shape, stl::TaskShape::Trivial);
}

TEST(ScenarioJson, UnknownAgentInTask) {
  auto j = nlohmann::json::parse(kMinimal);
  j["tasks"][0]["agent"] = 9;
  std::string what;
  EXPECT_EQ(parse_code(j.dump(), &what), ErrorCode::Validation);
  EXPECT_NE(what.find("tasks[0].agent"), std::string::npos) << what;
}

TEST(ScenarioJson, Validation) {
  EXPECT_EQ(parse_code(patched("delta", "0")), ErrorCode::Validation);
  EXPECT_EQ(parse_code(patched("delta", "-1")), ErrorCode::Validation);
  EXPECT_EQ(parse_code(patched("eta_detect", "0.7")), ErrorCode::Validation);
  EXPECT_EQ(parse_code(patched("bogus", "1")), ErrorCode::Validation);
  EXPECT_EQ(parse_code("{not json"), ErrorCode::Parse);
  auto j = nlohmann::json::parse(kMinimal);
  j["tasks"][0]["formula"] = "F[3,1] dist(1,[2,2]) <= 1";
  EXPECT_EQ(parse_code(j.dump()), ErrorCode::Parse);
  j = nlohmann::json::parse(kMinimal);
  j["agents"][1]["id"] = 1;
  EXPECT_EQ(parse_code(j.dump()), ErrorCode::Validation);
  j = nlohmann::json::parse(kMinimal);
  j["agents"][0]["x0"] = {0, 0, 0};
  EXPECT_EQ(parse_code(j.dump()), ErrorCode::Validation);
  EXPECT_THROW(io::load_scenario("/nonexistent/file.json"), Error);
}

TEST(Logs, CsvRoundTrip) {
  auto sc = io::parse_scenario(kMinimal);
  auto res = sim::run(sc);
  std::stringstream ss;
  io::write_trajectory_csv(ss, res.trajectory);
  std::string header;
  std::getline(std::stringstream(ss.str()), header);
  EXPECT_EQ(header, "t,agent,x1,x2,u1,u2,rho_psi,rho_max,funnel_lo,xi,eps,n_repairs,collab,unit_index");
  auto loaded = io::read_trace_csv(ss);
  auto expect = sim::trace_of(res.trajectory);
  ASSERT_EQ(loaded.trace.t.size(), expect.t.size());
  for (std::size_t k = 0; k < expect.t.size(); ++k) {
    EXPECT_NEAR(loaded.trace.t[k], expect.t[k], 1e-9);
    EXPECT_LT((loaded.trace.x[k] - expect.x[k]).cwiseAbs().maxCoeff(), 1e-9);
  }
  EXPECT_EQ(loaded.layout.size(), 4);
}

TEST(Logs, EventsAndSummaryAreJson) {
  auto sc = io::load_scenario(kScenarios / "scenario2.json");
  auto res = sim::run(sc);
  std::stringstream ev;
  io::write_events_jsonl(ev, res.events);
  std::string line;
  std::size_t n = 0;
  while (std::getline(ev, line)) {
    auto j = nlohmann::json::parse(line);
    for (const char* key : {"t", "jump_index", "agent", "kind", "before", "after"}) EXPECT_TRUE(j.contains(key));
    EXPECT_EQ(j["jump_index"].get<std::size_t>(), n);
    EXPECT_TRUE(j["before"].contains("rho_max"));
    ++n;
  }
  EXPECT_EQ(n, res.events.size());
  EXPECT_GT(n, 0u);

  std::stringstream sm;
  io::write_summary_json(sm, res.summary);
  auto j = nlohmann::json::parse(sm.str());
  EXPECT_EQ(j["agents"].size(), 5u);
  EXPECT_EQ(j["total_jumps"].get<std::size_t>(), res.events.size());
  EXPECT_EQ(j["clusters"].size(), res.summary.clusters.clusters.size());
}

TEST(Logs, WriteRunCreatesFiles) {
  auto dir = temp_dir("write_run") / "nested";
  auto res = sim::run(io::parse_scenario(kMinimal));
  auto paths = io::write_run(dir, res);
  EXPECT_TRUE(fs::exists(paths.trajectory));
  EXPECT_TRUE(fs::exists(paths.events));
  EXPECT_TRUE(fs::exists(paths.summary));
}

TEST(Cli, CheckAndRun) {
  auto dir = temp_dir("cli");
  auto ok = write_file(dir, "ok.json", kMinimal);
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_check(ok, out, err), 0) << err.str();
  EXPECT_NE(out.str().find("rho_opt"), std::string::npos);

  cli::RunOptions run;
  run.scenario = ok;
  run.out = dir / "out";
  std::ostringstream rout, rerr;
  EXPECT_EQ(cli::cmd_run(run, rout, rerr), 0) << rerr.str();
  EXPECT_NE(rout.str().find("agent 1: satisfied"), std::string::npos) << rout.str();
  EXPECT_TRUE(fs::exists(dir / "out" / "traj.csv"));

  run.dt = -1.0;
  std::ostringstream bout, berr;
  EXPECT_EQ(cli::cmd_run(run, bout, berr), 2);
}

TEST(Cli, CheckInfeasibleAndWarnings) {
  auto dir = temp_dir("cli_bad");
  auto j = nlohmann::json::parse(kMinimal);
  j["tasks"][0]["formula"] = "F[1,3] (dist(1,[0,0]) <= 1 && dist(1,[10,0]) <= 1)";
  auto bad = write_file(dir, "bad.json", j.dump());
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_check(bad, out, err), 2);
  EXPECT_NE(err.str().find("InfeasibleTask"), std::string::npos) << err.str();

  std::ostringstream out2, err2;
  EXPECT_EQ(cli::cmd_check(kScenarios / "scenario2.json", out2, err2), 0) << err2.str();
  EXPECT_NE(err2.str().find("repair scheme will govern"), std::string::npos);

  std::ostringstream out3, err3;
  EXPECT_EQ(cli::cmd_check(dir / "missing.json", out3, err3), 2);
}

TEST(Cli, Eval) {
  auto dir = temp_dir("cli_eval");
  auto res = sim::run(io::parse_scenario(kMinimal));
  auto csv = dir / "traj.csv";
  {
    std::ofstream os(csv);
    io::write_trajectory_csv(os, res.trajectory);
  }
  cli::EvalOptions e;
  e.trace = csv;
  e.formula = "F[1,3] dist(1,[2,2]) <= 1";
  std::ostringstream out, err;
  EXPECT_EQ(cli::cmd_eval(e, out, err), 0) << err.str();
  EXPECT_NE(out.str().find("satisfied"), std::string::npos);

  e.formula = "G[0,3] dist(2,[100,100]) <= 1";
  std::ostringstream out2, err2;
  EXPECT_EQ(cli::cmd_eval(e, out2, err2), 1);
  EXPECT_NE(out2.str().find("violated"), std::string::npos);

  e.formula = "F[1,30] dist(1,[2,2]) <= 1";
  std::ostringstream out3, err3;
  EXPECT_EQ(cli::cmd_eval(e, out3, err3), 2);
  EXPECT_NE(err3.str().find("window"), std::string::npos) << err3.str();
}
