#pragma once

#include <algorithm>
#include <numeric>
#include <vector>

#include "transversal/strategy/common.hpp"

namespace transversal {

/// Indices i with neither (i,n) nor (n,i) held by O, for a board already in
/// frame coordinates.
inline std::vector<int> compute_s_o(const Board& frame_board)
{
  const int n = frame_board.size();
  std::vector<int> out;
  for (int i = 1; i <= n; ++i)
    if (!frame_board.owns(Player::O, {i, n}) && !frame_board.owns(Player::O, {n, i})) out.push_back(i);
  return out;
}

namespace detail {

/// The induction invariant for `k`, checked on the frame-mapped board:
/// X on (a,a) for a <= k+1, no O with both coordinates above k+1, and some O
/// in column k+2.
inline void check_star(const Board& p, int k, StrategyState& st)
{
  const int n = p.size();
  for (int a = 1; a <= k + 1; ++a)
    require(p.owns(Player::X, {a, a}), st, "induction invariant violated: no X on (" + std::to_string(a) + "," + std::to_string(a) + ")");
  for (int a = k + 2; a <= n; ++a)
    for (int b = k + 2; b <= n; ++b)
      require(!p.owns(Player::O, {a, b}), st, "induction invariant violated: O inside the lower-right block at " + to_string(Cell{a, b}));
  bool column_has_o = false;
  for (int a = 1; a <= n; ++a) column_has_o = column_has_o || p.owns(Player::O, {a, k + 2});
  require(column_has_o, st, "induction invariant violated: no O in column " + std::to_string(k + 2));
}

inline void push_frame(StrategyState& st, const GoodTransform& t) { st.frame = compose(t, st.frame); }

inline Cell to_real(const StrategyState& st, Cell frame_cell) { return map_cell(invert(st.frame), frame_cell); }

/// Moves the opponent's reply to the first move onto (2,2) or (1,2).
inline void normalize_first_reply(StrategyState& st, Cell o)
{
  const int n = st.frame.size();
  if (o.row == 1 || o.col == 1) {
    if (o.col == 1) {
      push_frame(st, GoodTransform::transposition(n));
      o = {o.col, o.row};
    }
    if (o.col != 2) push_frame(st, GoodTransform::col_swap(n, o.col, 2));
  } else {
    if (o.row != 2) push_frame(st, GoodTransform::row_swap(n, o.row, 2));
    if (o.col != 2) push_frame(st, GoodTransform::col_swap(n, o.col, 2));
  }
}

/// Verifies a threatening move before it is played: the cell is free, the
/// opponent has nothing to win with, and after the move every named cell is
/// a threat.
inline void check_threat_move(StrategyState& st, const Board& real, Cell frame_move,
                              std::initializer_list<Cell> frame_threats)
{
  const Cell move = to_real(st, frame_move);
  require(real.is_empty(move), st, "threat cell " + to_string(frame_move) + " is occupied");
  require(threat_count(real, Player::O) == 0, st, "O has a threat before X's forcing move");
  const Board after = real.placed(Player::X, move);
  const auto ts = threats(after, Player::X);
  for (Cell t : frame_threats)
    require(contains_cell(ts, to_real(st, t)), st, "expected X threat on " + to_string(t) + " not present");
}

} // namespace detail

/// Brings the position reached after 2n-2 moves into the normal form of the
/// endgame and selects the case. The frame gains an identical relabelling of
/// the first n-1 rows and columns so that S_O = [s]; for s = 1 it is further
/// relabelled to the canonical T_O layout (n >= 5) or to put an O on (3,4)
/// (n = 4).
struct Checkpoint {
  StrategyState state;
  int s = 0;
  std::optional<int> r;
  CaseTag tag = CaseTag::Case2;
};

inline Checkpoint normalize_checkpoint(StrategyState st, const Board& real)
{
  using detail::require;
  const int n = real.size();
  Board p = apply(st.frame, real);
  auto inconsistent = [](const std::string& why) { return error(errc::inconsistent_history, why); };
  if (p.stones(Player::X) != n - 1 || p.stones(Player::O) != n - 1)
    throw inconsistent("checkpoint needs n-1 stones per player");
  for (int i = 1; i < n; ++i)
    if (!p.owns(Player::X, {i, i})) throw inconsistent("checkpoint needs X on the first n-1 diagonal cells");
  if (!p.owns(Player::O, {n, n})) throw inconsistent("checkpoint needs O on (n,n)");
  bool column_o = false;
  for (int a = 1; a < n; ++a) column_o = column_o || p.owns(Player::O, {a, n});
  if (!column_o) throw inconsistent("checkpoint needs a second O in the last column");

  const std::vector<int> s_o = compute_s_o(p);
  const int s = int(s_o.size());
  require(s >= 1 && s <= n - 2, st, "|S_O| outside [1, n-2]");

  // Relabel so that S_O = [s], everything else keeps its relative order.
  std::vector<int> perm(static_cast<std::size_t>(n));
  {
    int next = 1;
    for (int i : s_o) perm[i - 1] = next++;
    for (int i = 1; i < n; ++i)
      if (!std::binary_search(s_o.begin(), s_o.end(), i)) perm[i - 1] = next++;
    perm[n - 1] = n;
  }
  detail::push_frame(st, GoodTransform::relabel(n, perm));
  p = apply(st.frame, real);
  {
    const auto check = compute_s_o(p);
    std::vector<int> expect(static_cast<std::size_t>(s));
    std::iota(expect.begin(), expect.end(), 1);
    require(check == expect, st, "relabelling did not produce S_O = [s]");
  }

  Checkpoint out;
  out.s = s;
  if (s >= 2) {
    int free_cols = 0;
    for (int c = 1; c <= n; ++c) {
      bool has_o = false;
      for (int a = 1; a <= n; ++a) has_o = has_o || p.owns(Player::O, {a, c});
      free_cols += has_o ? 0 : 1;
    }
    require(free_cols >= 2, st, "Case 2 needs at least two columns without O");
    std::optional<Cell> bc;
    for (int b = 1; b <= s && !bc; ++b)
      for (int c = 1; c <= s && !bc; ++c)
        if (b != c && p.is_empty({b, c})) bc = Cell{b, c};
    require(bc.has_value(), st, "Case 2 found no empty off-diagonal cell in [s]x[s]");
    st.case_data = CaseData{s, std::nullopt, bc->row, bc->col};
    out.tag = CaseTag::Case2;
  } else if (n >= 5) {
    int r = 0;
    for (int i = 1; i < n; ++i) r += p.owns(Player::O, {i, n}) ? 1 : 0;
    require(r >= 1 && r <= n - 2, st, "r outside [1, n-2]");
    for (int i = 2; i < n; ++i)
      require(p.owns(Player::O, {i, n}) != p.owns(Player::O, {n, i}), st,
              "Case 1 needs exactly one O in each pair (i,n),(n,i)");
    // Indices whose O sits in the last row go first, then those whose O sits
    // in the last column.
    std::vector<int> relabel(static_cast<std::size_t>(n));
    relabel[0] = 1;
    relabel[n - 1] = n;
    int low = 2;
    int high = n - r;
    for (int i = 2; i < n; ++i) relabel[i - 1] = p.owns(Player::O, {n, i}) ? low++ : high++;
    detail::push_frame(st, GoodTransform::relabel(n, relabel));
    p = apply(st.frame, real);
    for (int i = 2; i <= n - r - 1; ++i) require(p.owns(Player::O, {n, i}), st, "Case 1 layout: missing O in row n");
    for (int i = n - r; i <= n; ++i) require(p.owns(Player::O, {i, n}), st, "Case 1 layout: missing O in column n");
    st.case_data = CaseData{s, r, 0, 0};
    out.r = r;
    out.tag = r == n - 2 ? CaseTag::Case1a : CaseTag::Case1b;
  } else {
    // n = 4: make (3,4) hold an O using one relabelling of rows and columns.
    if (!p.owns(Player::O, {3, 4})) {
      const std::vector<int> swap23{1, 3, 2, 4};
      detail::push_frame(st, GoodTransform::relabel(n, swap23));
      p = apply(st.frame, real);
    }
    require(p.owns(Player::O, {3, 4}), st, "Case 3 needs an O on (3,4)");
    const bool top = p.owns(Player::O, {2, 4});
    const bool left = p.owns(Player::O, {4, 2});
    require(top != left, st, "Case 3 needs exactly one O on (2,4),(4,2)");
    st.case_data = CaseData{s, std::nullopt, 0, 0};
    out.tag = top ? CaseTag::Case3a : CaseTag::Case3b;
  }
  out.state = std::move(st);
  return out;
}

namespace detail {

/// One endgame move in frame coordinates, the cell O must then block (if the
/// move is a single threat) and the threats it creates.
struct EndgameMove {
  Cell move;
  std::optional<Cell> block;
  std::vector<Cell> threats;
};

inline EndgameMove endgame_move(CaseTag tag, int step, int n, const CaseData& cd)
{
  switch (tag) {
  case CaseTag::Case1a:
  case CaseTag::Case1b:
    if (step == 0) return {{1, n}, Cell{n, 1}, {{n, 1}}};
    if (step == 1) return {{n, n - 1}, Cell{n - 1, 1}, {{n - 1, 1}}};
    if (tag == CaseTag::Case1a) return {{2, 1}, std::nullopt, {{n - 1, 2}, {n, 2}}};
    return {{n - 1, 2}, std::nullopt, {{2, 1}, {2, n}}};
  case CaseTag::Case2:
    if (step == 0) return {{n, cd.b}, Cell{cd.b, n}, {{cd.b, n}}};
    return {{cd.c, n}, std::nullopt, {{n, cd.c}, {cd.b, cd.c}}};
  case CaseTag::Case3a:
  case CaseTag::Case3b:
    if (step == 0) return {{1, 4}, Cell{4, 1}, {{4, 1}}};
    if (step == 1) return {{4, 3}, Cell{3, 1}, {{3, 1}}};
    if (tag == CaseTag::Case3a) return {{2, 1}, std::nullopt, {{3, 2}, {4, 2}}};
    return {{3, 2}, std::nullopt, {{2, 1}, {2, 4}}};
  }
  throw error(errc::invalid_argument, "unknown case");
}

inline Decision play_endgame(StrategyState st, const Board& real)
{
  const int n = real.size();
  const EndgameMove em = endgame_move(st.phase.tag, st.phase.step, n, *st.case_data);
  const Cell move = to_real(st, em.move);
  require(real.is_empty(move), st, "endgame cell " + to_string(em.move) + " is occupied");
  require(threat_count(real, Player::O) == 0, st, "O has a threat before X's forcing move");
  const auto ts = threats(real.placed(Player::X, move), Player::X);
  for (Cell t : em.threats)
    require(contains_cell(ts, to_real(st, t)), st, "expected X threat on " + to_string(t) + " not present");
  if (em.block) {
    st.pending = em.block;
    ++st.phase.step;
  } else {
    st.pending.reset();
    st.phase.kind = Phase::Kind::Closing;
  }
  return finish(std::move(st), real, Player::X, move);
}

} // namespace detail

/// X's winning strategy for n >= 4. Each call takes the state returned by the
/// previous call and the current board (X to move).
inline Decision theorem1_next(StrategyState st, const Board& b, std::optional<Cell> last_opponent_move = std::nullopt)
{
  using namespace detail;
  using K = Phase::Kind;
  const int n = b.size();
  if (n < 4) throw error(errc::invalid_argument, "theorem1 needs n >= 4");
  if (!b.counts_consistent() || b.to_move() != Player::X) throw error(errc::not_x_turn, "it is not X's turn");
  if (game_status(b, Variant::Strong).is_over()) throw error(errc::game_over, "game is already decided");

  if (st.phase.kind == K::Opening) {
    if (b.stones(Player::X) + b.stones(Player::O) != 0 || st.last_board)
      throw error(errc::inconsistent_history, "theorem1 must open on an empty board");
    st = StrategyState{};
    st.frame = GoodTransform::identity(n);
    st.phase.kind = K::Base;
    return finish(std::move(st), b, Player::X, {1, 1});
  }

  const std::optional<Cell> reply = observe_reply(st, b, Player::X, last_opponent_move);
  if (!reply) throw error(errc::inconsistent_history, "missing history");

  // Any line where O leaves a threat open ends here.
  if (auto win = first_threat(b, Player::X)) {
    st.phase.kind = K::Filler;
    st.pending.reset();
    return finish(std::move(st), b, Player::X, *win);
  }

  Cell o = map_cell(st.frame, *reply);
  switch (st.phase.kind) {
  case K::Base: {
    normalize_first_reply(st, o);
    const Cell move = to_real(st, {2, 3});
    require(b.is_empty(move), st, "base move (2,3) occupied");
    push_frame(st, GoodTransform::col_swap(n, 2, 3));
    check_star(apply(st.frame, b.placed(Player::X, move)), 1, st);
    st.phase = {n == 4 ? K::ThreatMove : K::Induction, 1};
    return finish(std::move(st), b, Player::X, move);
  }
  case K::Induction: {
    const int k = st.phase.k;
    Cell move;
    if (o.row <= k + 1 || o.col <= k + 1) {
      move = to_real(st, {k + 2, k + 3});
      push_frame(st, GoodTransform::col_swap(n, k + 2, k + 3));
    } else {
      if (o.col == k + 2) {
        push_frame(st, GoodTransform::col_swap(n, k + 2, k + 3));
        o.col = k + 3;
      }
      move = to_real(st, {o.row, k + 2});
      if (o.row != k + 2) push_frame(st, GoodTransform::row_swap(n, o.row, k + 2));
      if (o.col != k + 3) push_frame(st, GoodTransform::col_swap(n, k + 3, o.col));
    }
    require(b.is_empty(move), st, "induction move occupied");
    check_star(apply(st.frame, b.placed(Player::X, move)), k + 1, st);
    st.phase = {k + 1 == n - 3 ? K::ThreatMove : K::Induction, k + 1};
    return finish(std::move(st), b, Player::X, move);
  }
  case K::ThreatMove: {
    Cell move_f;
    if (o == Cell{n, n - 1} || o == Cell{n - 1, n}) {
      move_f = {n, n};
      st.pending = Cell{n - 1, n - 1};
      st.post_block = 2;
    } else {
      move_f = {n - 1, n};
      st.pending = Cell{n, n - 1};
      st.post_block = 1;
    }
    check_threat_move(st, b, move_f, {*st.pending});
    st.phase.kind = K::AwaitBlock;
    const Cell move = to_real(st, move_f);
    return finish(std::move(st), b, Player::X, move);
  }
  case K::AwaitBlock: {
    require(st.pending && o == *st.pending, st, "O did not block at the expected cell");
    if (st.post_block == 1) {
      push_frame(st, GoodTransform::col_swap(n, n - 1, n));
    } else {
      push_frame(st, GoodTransform::col_swap(n, n - 1, n));
      push_frame(st, GoodTransform::row_swap(n, n - 1, n));
    }
    st.pending.reset();
    st.post_block = 0;
    Checkpoint cp = normalize_checkpoint(std::move(st), b);
    st = std::move(cp.state);
    st.phase = {K::Endgame, n - 3, cp.tag, 0};
    return play_endgame(std::move(st), b);
  }
  case K::Endgame:
    require(st.pending && o == *st.pending, st, "O did not block at the expected cell");
    return play_endgame(std::move(st), b);
  case K::Closing:
    // O can block only one of two threats, so a win was available above.
    require(false, st, "double threat did not leave a winning cell");
    break;
  case K::Opening:
  case K::Filler:
    break;
  }
  throw error(errc::inconsistent_history, "theorem1 called after the game was decided");
}

} // namespace transversal
