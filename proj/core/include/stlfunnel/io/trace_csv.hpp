#pragma once

#include <filesystem>
#include <istream>

#include "stlfunnel/stl/layout.hpp"
#include "stlfunnel/stl/robustness.hpp"

namespace stlfunnel::io {

struct LoadedTrace {
  stl::StateLayout layout;
  stl::Trace trace;
};

// Rebuilds stacked states from a trajectory CSV; throws Error{Parse | Io}.
LoadedTrace read_trace_csv(std::istream& is);
LoadedTrace read_trace_csv(const std::filesystem::path& path);

}  // namespace stlfunnel::io
