#pragma once

#include <filesystem>
#include <string_view>

#include "stlfunnel/sim/scenario.hpp"

namespace stlfunnel::io {

// Throws Error{Parse} for malformed JSON or formulas and Error{Validation}
// with a field path such as "tasks[0].agent".
sim::Scenario parse_scenario(std::string_view json_text, std::string name = {});
sim::Scenario load_scenario(const std::filesystem::path& path);

}  // namespace stlfunnel::io
