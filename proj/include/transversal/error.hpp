#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace transversal {

enum class errc {
  invalid_argument,
  out_of_bounds,
  occupied_cell,
  wrong_turn,
  game_over,
  dimension_mismatch,
  inconsistent_position,
  node_limit_exceeded,
  inconsistent_history,
  not_x_turn,
  invariant_violation,
  tractability_bound,
  parse_error,
  not_found,
  conflict,
};

constexpr std::string_view to_string(errc code) noexcept
{
  switch (code) {
  case errc::invalid_argument: return "InvalidArgument";
  case errc::out_of_bounds: return "OutOfBounds";
  case errc::occupied_cell: return "OccupiedCell";
  case errc::wrong_turn: return "WrongTurn";
  case errc::game_over: return "GameOver";
  case errc::dimension_mismatch: return "DimensionMismatch";
  case errc::inconsistent_position: return "InconsistentPosition";
  case errc::node_limit_exceeded: return "NodeLimitExceeded";
  case errc::inconsistent_history: return "InconsistentHistory";
  case errc::not_x_turn: return "NotXTurn";
  case errc::invariant_violation: return "InvariantViolation";
  case errc::tractability_bound: return "TractabilityBound";
  case errc::parse_error: return "ParseError";
  case errc::not_found: return "NotFound";
  case errc::conflict: return "Conflict";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above so
/// callers (CLI exit codes, HTTP status mapping) can branch on it.
class error : public std::runtime_error {
public:
  error(errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code), message_(what)
  {
  }

  errc code() const noexcept { return code_; }
  /// The text without the code prefix.
  const std::string& message() const noexcept { return message_; }

private:
  errc code_;
  std::string message_;
};

} // namespace transversal
