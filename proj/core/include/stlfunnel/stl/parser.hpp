#pragma once

#include <string_view>

#include "stlfunnel/stl/formula.hpp"

namespace stlfunnel::stl {

// Throws Error{Syntax | TimeBoundOrder | NonConcaveNegation}.
TaskFormula parse_task(std::string_view text);

// A single temporal unit; rejects sequences and nests.
PhiFormula parse_phi(std::string_view text);

}  // namespace stlfunnel::stl
