#pragma once

#include <bit>
#include <cstdint>
#include <map>
#include <utility>

#include "transversal/solver.hpp"
#include "transversal/strategy/common.hpp"

namespace transversal {

/// Maker's replies on a 4x4 subgrid, keyed by the local (X rows, O rows)
/// packed four bits per row, Maker to move. Built once by walking every
/// Breaker reply (including replies outside the subgrid, which act as passes)
/// from the opening on (1,1), with each Maker move taken from the solver.
class MakerBreakerBaseTable {
public:
  using Key = std::pair<std::uint16_t, std::uint16_t>;

  static const MakerBreakerBaseTable& instance()
  {
    static const MakerBreakerBaseTable table;
    return table;
  }

  static Key key_of(const Board& local)
  {
    std::uint16_t x = 0, o = 0;
    for (int r = 0; r < 4; ++r) {
      x = std::uint16_t(x | (local.row(Player::X, r) << (4 * r)));
      o = std::uint16_t(o | (local.row(Player::O, r) << (4 * r)));
    }
    return {x, o};
  }

  std::optional<Cell> lookup(const Board& local) const
  {
    const auto it = moves_.find(key_of(local));
    if (it == moves_.end()) return std::nullopt;
    return it->second;
  }

  const std::map<Key, Cell>& entries() const noexcept { return moves_; }

  static Board decode(Key k)
  {
    Board b(4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) {
        if ((k.first >> (4 * r + c)) & 1u) b.place(Player::X, {r + 1, c + 1});
        if ((k.second >> (4 * r + c)) & 1u) b.place(Player::O, {r + 1, c + 1});
      }
    return b;
  }

private:
  MakerBreakerBaseTable() : solver_(SolveOptions{.memo_capacity = std::size_t(1) << 18})
  {
    const Board empty(4);
    moves_[key_of(empty)] = Cell{1, 1};
    expand_after_maker(empty.placed(Player::X, {1, 1}));
  }

  void expand_after_maker(const Board& b)
  {
    if (has_won(b, Player::X)) return;
    for (Cell c : b.empty_cells()) visit(b.placed(Player::O, c));
    visit(b);
  }

  void visit(const Board& b)
  {
    const Key k = key_of(b);
    if (moves_.count(k)) return;
    const SolveResult r = solver_.solve(b, Player::X, Variant::MakerBreaker);
    if (r.value != Value::FirstPlayerWin || !r.best_move)
      throw error(errc::invariant_violation, "4x4 Maker-Breaker base position is not a Maker win");
    moves_[k] = *r.best_move;
    expand_after_maker(b.placed(Player::X, *r.best_move));
  }

  Solver solver_;
  std::map<Key, Cell> moves_;
};

namespace detail {

inline int nth_bit(unsigned mask, int index)
{
  for (int i = 0; i < index; ++i) mask &= mask - 1;
  return std::countr_zero(mask);
}

inline Board extract_subgrid(const Board& b, RowMask rows, RowMask cols)
{
  const int m = std::popcount(unsigned(rows));
  Board local(m);
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j) {
      const Cell real{nth_bit(rows, i) + 1, nth_bit(cols, j) + 1};
      const CellState s = b.at(real);
      if (s == CellState::X) local.place(Player::X, {i + 1, j + 1});
      if (s == CellState::O) local.place(Player::O, {i + 1, j + 1});
    }
  return local;
}

inline RowMask without(RowMask m, int index1) { return RowMask(m & ~(1u << (index1 - 1))); }

inline bool in_mask(RowMask m, int index1) { return (m >> (index1 - 1)) & 1u; }

} // namespace detail

/// Maker's strategy by induction on the live subgrid: hold its top-left
/// cell; a Breaker move on that cell's row or column (or outside the
/// subgrid) drops the row and column; a Breaker move (a,b) elsewhere is
/// answered on (a,c) with c the smallest live column other than the anchor's
/// and b, dropping row a and column c. Four live lines remain for the table.
inline Decision maker_breaker_next(StrategyState st, const Board& b, std::optional<Cell> last_opponent_move = std::nullopt)
{
  using namespace detail;
  using K = Phase::Kind;
  const int n = b.size();
  if (n < 4) throw error(errc::invalid_argument, "maker-breaker needs n >= 4");
  if (b.to_move() != Player::X || !b.counts_consistent()) throw error(errc::not_x_turn, "it is not Maker's turn");
  if (game_status(b, Variant::MakerBreaker).is_over()) throw error(errc::game_over, "game is already decided");

  std::optional<Cell> reply;
  if (st.phase.kind == K::Opening) {
    if (b.stones(Player::X) + b.stones(Player::O) != 0 || st.last_board)
      throw error(errc::inconsistent_history, "maker-breaker must open on an empty board");
    st = StrategyState{};
    st.frame = GoodTransform::identity(n);
    st.phase.kind = K::Induction;
    st.subgrid.rows = st.subgrid.cols = b.full_mask();
    st.subgrid.fresh = true;
  } else {
    reply = observe_reply(st, b, Player::X, last_opponent_move);
    if (auto win = first_threat(b, Player::X)) return finish(std::move(st), b, Player::X, *win);
  }

  SubgridState& g = st.subgrid;
  for (;;) {
    const int m = std::popcount(unsigned(g.rows));
    require(m == std::popcount(unsigned(g.cols)) && m >= 4, st, "live subgrid is not square of size >= 4");
    if (m == 4) {
      const Board local = extract_subgrid(b, g.rows, g.cols);
      const auto local_move = MakerBreakerBaseTable::instance().lookup(local);
      require(local_move.has_value(), st, "4x4 position missing from the base table");
      const Cell move{nth_bit(g.rows, local_move->row - 1) + 1, nth_bit(g.cols, local_move->col - 1) + 1};
      g.fresh = false;
      return finish(std::move(st), b, Player::X, move);
    }
    if (g.fresh) {
      const Cell anchor{std::countr_zero(unsigned(g.rows)) + 1, std::countr_zero(unsigned(g.cols)) + 1};
      g.anchor = anchor;
      g.fresh = false;
      return finish(std::move(st), b, Player::X, anchor);
    }
    require(reply.has_value() && g.anchor.has_value(), st, "no Breaker move to answer");
    const Cell o = *reply;
    const Cell anchor = *g.anchor;
    const bool inside = in_mask(g.rows, o.row) && in_mask(g.cols, o.col);
    if (!inside || o.row == anchor.row || o.col == anchor.col) {
      g.rows = without(g.rows, anchor.row);
      g.cols = without(g.cols, anchor.col);
      g.anchor.reset();
      g.fresh = true;
      continue;
    }
    int c = 0;
    for (unsigned cols = g.cols; cols; cols &= cols - 1) {
      const int cand = std::countr_zero(cols) + 1;
      if (cand != anchor.col && cand != o.col) {
        c = cand;
        break;
      }
    }
    const Cell move{o.row, c};
    g.rows = without(g.rows, o.row);
    g.cols = without(g.cols, c);
    return finish(std::move(st), b, Player::X, move);
  }
}

} // namespace transversal
