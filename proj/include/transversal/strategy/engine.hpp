#pragma once

#include <charconv>
#include <random>
#include <string>
#include <string_view>

#include "transversal/solver.hpp"
#include "transversal/strategy/maker_breaker.hpp"
#include "transversal/strategy/prop2.hpp"
#include "transversal/strategy/theorem1.hpp"

namespace transversal {

enum class StrategyKind : std::uint8_t { Theorem1, Prop2XDraw, Prop2ODraw, MakerBreaker, SolverPerfect, Random };

struct StrategyId {
  StrategyKind kind = StrategyKind::Theorem1;
  std::uint64_t seed = 0;

  friend bool operator==(const StrategyId&, const StrategyId&) = default;
};

inline StrategyId parse_strategy_id(std::string_view s)
{
  if (s == "theorem1") return {StrategyKind::Theorem1};
  if (s == "prop2-x-draw") return {StrategyKind::Prop2XDraw};
  if (s == "prop2-o-draw") return {StrategyKind::Prop2ODraw};
  if (s == "maker-breaker") return {StrategyKind::MakerBreaker};
  if (s == "solver-perfect") return {StrategyKind::SolverPerfect};
  if (s == "random") return {StrategyKind::Random, 0};
  if (s.starts_with("random(") && s.ends_with(")")) {
    const std::string_view digits = s.substr(7, s.size() - 8);
    std::uint64_t seed = 0;
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), seed);
    if (ec == std::errc{} && ptr == digits.data() + digits.size() && !digits.empty())
      return {StrategyKind::Random, seed};
  }
  throw error(errc::invalid_argument, "unknown strategy '" + std::string(s) + "'");
}

inline std::string to_string(const StrategyId& id)
{
  switch (id.kind) {
  case StrategyKind::Theorem1: return "theorem1";
  case StrategyKind::Prop2XDraw: return "prop2-x-draw";
  case StrategyKind::Prop2ODraw: return "prop2-o-draw";
  case StrategyKind::MakerBreaker: return "maker-breaker";
  case StrategyKind::SolverPerfect: return "solver-perfect";
  case StrategyKind::Random: return "random(" + std::to_string(id.seed) + ")";
  }
  return "?";
}

/// Side a strategy is written for, if it is restricted to one.
inline std::optional<Player> fixed_side(StrategyKind k)
{
  switch (k) {
  case StrategyKind::Theorem1:
  case StrategyKind::Prop2XDraw:
  case StrategyKind::MakerBreaker: return Player::X;
  case StrategyKind::Prop2ODraw: return Player::O;
  case StrategyKind::SolverPerfect:
  case StrategyKind::Random: return std::nullopt;
  }
  return std::nullopt;
}

/// A strategy bound to a game: id, side, variant and private state. Copying
/// an engine forks it, which is how exhaustive verification branches.
class Engine {
public:
  Engine(StrategyId id, int n, Variant variant, Player side) : id_(id), n_(n), variant_(variant), side_(side)
  {
    if (auto fixed = fixed_side(id.kind); fixed && *fixed != side)
      throw error(errc::invalid_argument, to_string(id) + " plays " + std::string(1, to_char(*fixed)) + " only");
    switch (id.kind) {
    case StrategyKind::Theorem1:
      if (n < 4 || variant != Variant::Strong) throw error(errc::invalid_argument, "theorem1 needs the strong game with n >= 4");
      break;
    case StrategyKind::Prop2XDraw:
    case StrategyKind::Prop2ODraw:
      if (n != 3 || variant != Variant::Strong) throw error(errc::invalid_argument, "prop2 strategies need the strong game with n = 3");
      break;
    case StrategyKind::MakerBreaker:
      if (n < 4 || variant != Variant::MakerBreaker)
        throw error(errc::invalid_argument, "maker-breaker needs the Maker-Breaker game with n >= 4");
      break;
    case StrategyKind::SolverPerfect:
      if (n > 4) throw error(errc::invalid_argument, "solver-perfect is limited to n <= 4");
      break;
    case StrategyKind::Random: break;
    }
    state_.seed = id.seed;
  }

  const StrategyId& id() const noexcept { return id_; }
  Player side() const noexcept { return side_; }
  Variant variant() const noexcept { return variant_; }
  const StrategyState& state() const noexcept { return state_; }

  /// Chooses a move for the current board, which must have `side()` to move.
  Cell next(const Board& b, std::optional<Cell> last_opponent_move = std::nullopt)
  {
    if (b.size() != n_) throw error(errc::dimension_mismatch, "engine bound to a different board size");
    Decision d = dispatch(b, last_opponent_move);
    state_ = std::move(d.state);
    return d.move;
  }

private:
  Decision dispatch(const Board& b, std::optional<Cell> last)
  {
    switch (id_.kind) {
    case StrategyKind::Theorem1: return theorem1_next(state_, b, last);
    case StrategyKind::Prop2XDraw: return prop2_x_draw_next(state_, b, last);
    case StrategyKind::Prop2ODraw: return prop2_o_draw_next(state_, b, last);
    case StrategyKind::MakerBreaker: return maker_breaker_next(state_, b, last);
    case StrategyKind::SolverPerfect: return solver_move(b);
    case StrategyKind::Random: return random_move(b);
    }
    throw error(errc::invalid_argument, "unknown strategy");
  }

  Decision solver_move(const Board& b)
  {
    thread_local Solver solver(SolveOptions{.memo_capacity = std::size_t(1) << 20});
    const SolveResult r = solver.solve(b, side_, variant_);
    if (!r.best_move) throw error(errc::game_over, "no move in a decided position");
    return detail::finish(state_, b, side_, *r.best_move);
  }

  Decision random_move(const Board& b)
  {
    const auto empties = b.empty_cells();
    if (empties.empty()) throw error(errc::game_over, "board is full");
    std::seed_seq seq{std::uint32_t(id_.seed), std::uint32_t(id_.seed >> 32), std::uint32_t(state_.moves_made)};
    std::mt19937_64 rng(seq);
    std::uniform_int_distribution<std::size_t> pick(0, empties.size() - 1);
    return detail::finish(state_, b, side_, empties[pick(rng)]);
  }

  StrategyId id_;
  int n_;
  Variant variant_;
  Player side_;
  StrategyState state_;
};

} // namespace transversal
