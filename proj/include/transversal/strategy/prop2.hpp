#pragma once

#include <array>

#include "transversal/strategy/theorem1.hpp"

namespace transversal {

// Drawing strategies for both players on the 3x3 board.

/// X's drawing line: open in the corner, answer with (2,3), then close off a
/// column depending on where O first replied.
inline Decision prop2_x_draw_next(StrategyState st, const Board& b, std::optional<Cell> last_opponent_move = std::nullopt)
{
  using namespace detail;
  using K = Phase::Kind;
  if (b.size() != 3) throw error(errc::invalid_argument, "prop2-x-draw is defined for n = 3");
  if (!b.counts_consistent() || b.to_move() != Player::X) throw error(errc::not_x_turn, "it is not X's turn");
  if (game_status(b, Variant::Strong).is_over()) throw error(errc::game_over, "game is already decided");

  if (st.phase.kind == K::Opening) {
    if (b.stones(Player::X) + b.stones(Player::O) != 0 || st.last_board)
      throw error(errc::inconsistent_history, "prop2-x-draw must open on an empty board");
    st = StrategyState{};
    st.frame = GoodTransform::identity(3);
    st.phase.kind = K::Base;
    return finish(std::move(st), b, Player::X, {1, 1});
  }

  const std::optional<Cell> reply = observe_reply(st, b, Player::X, last_opponent_move);
  if (!reply) throw error(errc::inconsistent_history, "missing history");
  if (auto win = first_threat(b, Player::X)) {
    st.phase.kind = K::Filler;
    return finish(std::move(st), b, Player::X, *win);
  }
  if (st.phase.kind == K::Filler) return finish(std::move(st), b, Player::X, safe_filler(b, Player::X));

  const Cell o = map_cell(st.frame, *reply);
  Cell move_f;
  if (st.phase.kind == K::Base) {
    normalize_first_reply(st, o);
    const Board p = apply(st.frame, b);
    st.branch = p.owns(Player::O, {2, 2}) ? 1 : 2;
    move_f = {2, 3};
    st.pending = Cell{3, 2};
    st.phase = {K::Endgame, 0, CaseTag::Case2, 1};
  } else {
    require(st.pending && o == *st.pending, st, "O did not block at the expected cell");
    if (st.phase.step == 1) {
      // O on (2,2): X takes (3,1) and O must answer (1,2). O on (1,2): X takes
      // (3,3) and O must answer (2,2).
      move_f = st.branch == 1 ? Cell{3, 1} : Cell{3, 3};
      st.pending = st.branch == 1 ? Cell{1, 2} : Cell{2, 2};
      st.phase.step = 2;
    } else {
      // Seal the first or last column.
      move_f = st.branch == 1 ? Cell{2, 1} : Cell{1, 3};
      st.pending.reset();
      st.phase.kind = K::Filler;
    }
  }
  const Cell move = to_real(st, move_f);
  require(b.is_empty(move), st, "scripted cell " + to_string(move_f) + " is occupied");
  require(threat_count(b, Player::O) == 0, st, "O has a threat the script does not answer");
  if (st.pending)
    require(contains_cell(threats(b.placed(Player::X, move), Player::X), to_real(st, *st.pending)), st,
            "scripted move does not threaten " + to_string(*st.pending));
  return finish(std::move(st), b, Player::X, move);
}

namespace detail {

/// One branch of O's case analysis after X's second move, in frame
/// coordinates: O's reply, then for each of two rounds the cell X must take
/// (O takes it otherwise) and O's answer when X does take it.
struct DrawScript {
  Cell x_second;
  Cell reply;
  std::array<Cell, 2> expected;
  std::array<Cell, 2> answer;
};

inline constexpr std::array<DrawScript, 4> prop2_o_scripts{{
    {{1, 2}, {2, 3}, {{{2, 1}, {1, 3}}}, {{{3, 3}, {3, 2}}}},
    {{1, 3}, {2, 3}, {{{2, 1}, {1, 2}}}, {{{3, 2}, {3, 3}}}},
    {{2, 3}, {3, 2}, {{{1, 2}, {3, 3}}}, {{{3, 1}, {2, 1}}}},
    {{3, 3}, {3, 2}, {{{1, 2}, {2, 3}}}, {{{2, 1}, {3, 1}}}},
}};

} // namespace detail

/// O's drawing line: relabel X's opening to (1,1), take the centre, then
/// follow the case table for X's second move.
inline Decision prop2_o_draw_next(StrategyState st, const Board& b, std::optional<Cell> last_opponent_move = std::nullopt)
{
  using namespace detail;
  using K = Phase::Kind;
  if (b.size() != 3) throw error(errc::invalid_argument, "prop2-o-draw is defined for n = 3");
  if (!b.counts_consistent() || b.to_move() != Player::O) throw error(errc::wrong_turn, "it is not O's turn");
  if (game_status(b, Variant::Strong).is_over()) throw error(errc::game_over, "game is already decided");

  if (st.phase.kind == K::Opening) {
    if (b.stones(Player::X) != 1 || b.stones(Player::O) != 0 || st.last_board)
      throw error(errc::inconsistent_history, "prop2-o-draw expects exactly X's opening move");
    const Cell x = b.cells_of(Player::X).front();
    if (last_opponent_move && *last_opponent_move != x)
      throw error(errc::inconsistent_history, "reported opening does not match the board");
    st = StrategyState{};
    st.frame = GoodTransform::identity(3);
    if (x.row != 1) push_frame(st, GoodTransform::row_swap(3, x.row, 1));
    if (x.col != 1) push_frame(st, GoodTransform::col_swap(3, x.col, 1));
    st.phase.kind = K::Base;
    const Cell move = to_real(st, {2, 2});
    return finish(std::move(st), b, Player::O, move);
  }

  const std::optional<Cell> reply = observe_reply(st, b, Player::O, last_opponent_move);
  if (!reply) throw error(errc::inconsistent_history, "missing history");
  if (auto win = first_threat(b, Player::O)) {
    st.phase.kind = K::Filler;
    return finish(std::move(st), b, Player::O, *win);
  }
  if (st.phase.kind == K::Filler) return finish(std::move(st), b, Player::O, safe_filler(b, Player::O));

  Cell x = map_cell(st.frame, *reply);
  Cell move_f;
  if (st.phase.kind == K::Base) {
    // Reflect the lower triangle onto the upper one.
    if (x.row > x.col) {
      push_frame(st, GoodTransform::transposition(3));
      x = {x.col, x.row};
    }
    int branch = -1;
    for (int i = 0; i < int(prop2_o_scripts.size()); ++i)
      if (prop2_o_scripts[i].x_second == x) branch = i;
    require(branch >= 0, st, "X's second move " + to_string(x) + " not covered by the case analysis");
    st.branch = branch;
    move_f = prop2_o_scripts[branch].reply;
    st.phase = {K::Endgame, 0, CaseTag::Case2, 0};
  } else {
    const DrawScript& script = prop2_o_scripts[std::size_t(st.branch)];
    const int round = st.phase.step;
    if (x == script.expected[round]) {
      move_f = script.answer[round];
      if (++st.phase.step == 2) st.phase.kind = K::Filler;
    } else {
      // X skipped the cell; taking it seals a row or column for good.
      move_f = script.expected[round];
      st.phase.kind = K::Filler;
    }
  }
  const Cell move = to_real(st, move_f);
  require(b.is_empty(move), st, "scripted cell " + to_string(move_f) + " is occupied");
  if (auto threat = first_threat(b, Player::X))
    require(threat_count(b, Player::X) == 1 && *threat == move, st, "script leaves an X threat open");
  return finish(std::move(st), b, Player::O, move);
}

} // namespace transversal
