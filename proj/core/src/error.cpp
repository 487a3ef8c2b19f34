#include "stlfunnel/error.hpp"

#include <cstdio>

namespace stlfunnel {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Syntax: return "SyntaxError";
    case ErrorCode::TimeBoundOrder: return "TimeBoundOrder";
    case ErrorCode::NonConcaveNegation: return "NonConcaveNegation";
    case ErrorCode::SelectorOutOfRange: return "SelectorOutOfRange";
    case ErrorCode::WindowNotCovered: return "WindowNotCovered";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::InfeasibleTask: return "InfeasibleTask";
    case ErrorCode::BadInitial: return "BadInitial";
    case ErrorCode::FunnelExit: return "FunnelExit";
    case ErrorCode::DegenerateWindow: return "DegenerateWindow";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::ParamMismatch: return "ParamMismatch";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::JumpStorm: return "JumpStorm";
    case ErrorCode::Parse: return "ParseError";
    case ErrorCode::Validation: return "ValidationError";
    case ErrorCode::Io: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& what)
    : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

const char* to_string(Side side) { return side == Side::Lower ? "lower" : "upper"; }

static std::string exit_message(Side side, double xi) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%s boundary reached (xi = %.6g)", to_string(side), xi);
  return buf;
}

FunnelExit::FunnelExit(Side side, double xi)
    : Error(ErrorCode::FunnelExit, exit_message(side, xi)), side_(side), xi_(xi) {}

}  // namespace stlfunnel
