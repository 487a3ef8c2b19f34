#pragma once

#include <stdexcept>
#include <string>

namespace stlfunnel {

enum class ErrorCode {
  Syntax,
  TimeBoundOrder,
  NonConcaveNegation,
  SelectorOutOfRange,
  WindowNotCovered,
  NonFinite,
  InfeasibleTask,
  BadInitial,
  FunnelExit,
  DegenerateWindow,
  DimensionMismatch,
  ParamMismatch,
  NonFiniteState,
  JumpStorm,
  Parse,
  Validation,
  Io,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class Side { Lower, Upper };

const char* to_string(Side side);

// Raised when the normalized error leaves the detection band.
class FunnelExit : public Error {
 public:
  FunnelExit(Side side, double xi);
  Side side() const noexcept { return side_; }
  double xi() const noexcept { return xi_; }

 private:
  Side side_;
  double xi_;
};

}  // namespace stlfunnel
