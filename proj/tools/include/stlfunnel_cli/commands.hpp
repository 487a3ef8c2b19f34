#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>
#include <string>

namespace stlfunnel::cli {

struct RunOptions {
  std::filesystem::path scenario;
  std::filesystem::path out = "out";
  std::optional<std::uint64_t> seed;
  std::optional<double> dt;
};

struct EvalOptions {
  std::filesystem::path trace;
  std::string formula;
  double t0 = 0.0;
};

// Exit codes: 0 all verdicts satisfied (or relaxed run), 1 some violated, 2 error.
int cmd_run(const RunOptions& opt, std::ostream& out, std::ostream& err);
// 0 when every task admits an initial funnel, 2 otherwise.
int cmd_check(const std::filesystem::path& scenario, std::ostream& out, std::ostream& err);
// 0 when the trace robustness is positive, 1 when not, 2 on error.
int cmd_eval(const EvalOptions& opt, std::ostream& out, std::ostream& err);

int main(int argc, char** argv);

}  // namespace stlfunnel::cli
