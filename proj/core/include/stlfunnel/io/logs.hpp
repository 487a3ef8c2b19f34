#pragma once

#include <filesystem>
#include <ostream>

#include "stlfunnel/sim/simulator.hpp"

namespace stlfunnel::io {

// Columns: t, agent, x1..xn, u1..um, rho_psi, rho_max, funnel_lo, xi, eps,
// n_repairs, collab, unit_index. Shorter agents pad with nan.
void write_trajectory_csv(std::ostream& os, const sim::TrajectoryLog& log);
// One object per line: {t, jump_index, agent, kind, before, after}.
void write_events_jsonl(std::ostream& os, const std::vector<sim::JumpEvent>& events);
void write_summary_json(std::ostream& os, const sim::RunSummary& summary);

struct OutputPaths {
  std::filesystem::path trajectory;
  std::filesystem::path events;
  std::filesystem::path summary;
};

// Writes traj.csv, events.jsonl and summary.json under dir; throws Error{Io}.
OutputPaths write_run(const std::filesystem::path& dir, const sim::RunResult& result);

}  // namespace stlfunnel::io
