#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "transversal/core.hpp"

using namespace transversal;

namespace {

Board with(int n, std::initializer_list<Cell> xs, std::initializer_list<Cell> os = {})
{
  Board b(n);
  for (Cell c : xs) b.place(Player::X, c);
  for (Cell c : os) b.place(Player::O, c);
  return b;
}

errc code_of(auto&& fn)
{
  try {
    fn();
  } catch (const error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return errc::invariant_violation;
}

} // namespace

TEST(Board, NewBoard)
{
  const Board b = new_board(3);
  EXPECT_EQ(b.size(), 3);
  EXPECT_EQ(b.empty_count(), 9);
  EXPECT_EQ(b.to_move(), Player::X);
  EXPECT_EQ(new_board(1).empty_count(), 1);
  EXPECT_EQ(code_of([] { new_board(0); }), errc::invalid_argument);
  EXPECT_EQ(code_of([] { new_board(17); }), errc::invalid_argument);
  EXPECT_NO_THROW(new_board(16));
}

TEST(Board, ApplyMove)
{
  const Board b = apply_move(new_board(3), Player::X, {1, 1});
  EXPECT_TRUE(b.owns(Player::X, {1, 1}));
  EXPECT_EQ(b.to_move(), Player::O);
  EXPECT_EQ(code_of([&] { apply_move(b, Player::O, {1, 1}); }), errc::occupied_cell);
  EXPECT_EQ(code_of([] { apply_move(new_board(3), Player::O, {1, 1}); }), errc::wrong_turn);
  EXPECT_EQ(code_of([] { apply_move(new_board(3), Player::X, {0, 1}); }), errc::out_of_bounds);
  EXPECT_EQ(code_of([] { apply_move(new_board(3), Player::X, {1, 4}); }), errc::out_of_bounds);
  const Board won = with(2, {{1, 1}, {2, 2}}, {{1, 2}});
  EXPECT_EQ(code_of([&] { apply_move(won, Player::O, {2, 1}); }), errc::game_over);
}

TEST(Board, ValueSemantics)
{
  const Board a = new_board(4);
  const Board b = a.placed(Player::X, {2, 3});
  EXPECT_TRUE(a.is_empty({2, 3}));
  EXPECT_FALSE(b.is_empty({2, 3}));
  EXPECT_NE(a, b);
}

TEST(Matching, Examples)
{
  EXPECT_EQ(max_transversal_matching(new_board(4), Player::X), 0);
  EXPECT_EQ(max_transversal_matching(new_board(4), Player::O), 0);
  EXPECT_EQ(max_transversal_matching(with(3, {{1, 1}, {2, 2}, {3, 3}}), Player::X), 3);

  // O fills row n and column n of a 5x5 board.
  Board b(5);
  for (int i = 1; i <= 5; ++i) {
    b.place(Player::O, {5, i});
    if (i < 5) b.place(Player::O, {i, 5});
  }
  EXPECT_EQ(max_transversal_matching(b, Player::O), oracle::matching(b, Player::O));
  EXPECT_EQ(max_transversal_matching(b, Player::O), 2);
}

TEST(Matching, HasWon)
{
  EXPECT_TRUE(has_won(with(4, {{1, 1}, {2, 2}, {3, 3}, {4, 4}}), Player::X));
  EXPECT_FALSE(has_won(new_board(4), Player::X));
  const Board anti = with(4, {{1, 4}, {2, 2}, {3, 3}, {4, 1}, {1, 1}, {2, 3}});
  EXPECT_TRUE(oracle::won(anti, Player::X));
  EXPECT_TRUE(has_won(anti, Player::X));
}

TEST(Matching, AgreesWithBruteForce)
{
  std::mt19937_64 rng(11);
  for (int n = 1; n <= 6; ++n)
    for (int i = 0; i < 400; ++i) {
      const Board b = oracle::random_cells(n, rng);
      for (Player p : {Player::X, Player::O}) {
        ASSERT_EQ(max_transversal_matching(b, p), oracle::matching(b, p)) << to_text(b);
        ASSERT_EQ(can_ever_win(b, p), oracle::can_ever_win(b, p)) << to_text(b);
      }
    }
}

TEST(Threats, Examples)
{
  EXPECT_TRUE(threats(new_board(3), Player::X).empty());
  const Board b = with(3, {{1, 1}, {2, 3}}, {{2, 2}});
  EXPECT_EQ(threats(b, Player::X), (std::vector<Cell>{{3, 2}}));
}

TEST(Threats, AgreeWithPlaceAndCheck)
{
  std::mt19937_64 rng(12);
  for (int n = 1; n <= 6; ++n)
    for (int i = 0; i < 400; ++i) {
      const Board b = oracle::random_cells(n, rng);
      for (Player p : {Player::X, Player::O}) {
        ASSERT_EQ(threats(b, p), oracle::threats(b, p)) << to_text(b);
        ASSERT_EQ(threat_count(b, p), int(oracle::threats(b, p).size()));
      }
    }
}

TEST(Threats, LargeBoardsAgreeWithPlaceAndCheck)
{
  // Oracle here is the library's own has_won, already checked above; this
  // exercises the reachable-set path on boards too large for permutations.
  std::mt19937_64 rng(13);
  for (int n : {9, 12, 16})
    for (int i = 0; i < 30; ++i) {
      Board b = oracle::random_alternating(n, n * n / 2, rng);
      for (Player p : {Player::X, Player::O}) {
        std::vector<Cell> expect;
        for (Cell c : b.empty_cells())
          if (has_won(b.placed(p, c), p)) expect.push_back(c);
        ASSERT_EQ(threats(b, p), expect);
      }
    }
}

TEST(Matching, Monotone)
{
  std::mt19937_64 rng(14);
  for (int i = 0; i < 500; ++i) {
    const Board b = oracle::random_cells(5, rng);
    for (Cell c : b.empty_cells())
      for (Player p : {Player::X, Player::O}) {
        const Board next = b.placed(p, c);
        ASSERT_GE(max_transversal_matching(next, p), max_transversal_matching(b, p));
        ASSERT_LE(can_ever_win(next, opponent(p)), can_ever_win(b, opponent(p)));
      }
  }
}

TEST(CanEverWin, Examples)
{
  EXPECT_TRUE(can_ever_win(new_board(3), Player::X));
  EXPECT_TRUE(can_ever_win(new_board(3), Player::O));
  EXPECT_FALSE(can_ever_win(with(3, {{1, 1}, {2, 1}, {3, 1}}), Player::O));
  const Board blocked = with(3, {{1, 1}, {2, 3}, {3, 1}, {2, 1}}, {{1, 2}, {2, 2}, {3, 2}});
  EXPECT_FALSE(can_ever_win(blocked, Player::O));
}

TEST(Status, Examples)
{
  EXPECT_EQ(game_status(with(2, {{1, 1}, {2, 2}}, {{1, 2}}), Variant::Strong), GameStatus::won(Player::X));

  // Full draw from the X-draw line of the 3x3 game.
  const Board draw = with(3, {{1, 1}, {2, 3}, {3, 1}, {2, 1}, {3, 3}}, {{2, 2}, {3, 2}, {1, 2}, {1, 3}});
  EXPECT_FALSE(oracle::won(draw, Player::X));
  EXPECT_FALSE(oracle::won(draw, Player::O));
  EXPECT_EQ(game_status(draw, Variant::Strong), GameStatus::draw());

  Board mb(3);
  mb.place(Player::X, {1, 1});
  mb.place(Player::X, {3, 3});
  for (int c = 1; c <= 3; ++c) mb.place(Player::O, {2, c});
  EXPECT_EQ(game_status(mb, Variant::MakerBreaker), GameStatus::won(Player::O, true));
  EXPECT_EQ(game_status(new_board(3), Variant::MakerBreaker), GameStatus::in_progress(Player::X));
}

TEST(Status, ExactlyOneOutcomeOnReachablePositions)
{
  std::vector<Board> all;
  std::set<std::string> seen;
  oracle::reachable(new_board(3), Player::X, Variant::Strong, all, seen);
  for (const Board& b : all) {
    const GameStatus st = game_status(b, Variant::Strong);
    const bool xw = oracle::won(b, Player::X), ow = oracle::won(b, Player::O);
    ASSERT_FALSE(xw && ow);
    if (xw) ASSERT_TRUE(st.is_won_by(Player::X));
    else if (ow) ASSERT_TRUE(st.is_won_by(Player::O));
    else if (oracle::full(b)) ASSERT_EQ(st.kind, GameStatus::Kind::Draw);
    else ASSERT_EQ(st, GameStatus::in_progress(b.to_move()));
  }
  EXPECT_GT(all.size(), 1000u);
}

TEST(Text, RoundTrip)
{
  const Board b = with(3, {{1, 1}, {3, 2}}, {{2, 3}});
  EXPECT_EQ(to_text(b), "X..\n..O\n.X.\n");
  EXPECT_EQ(parse_text(to_text(b)), b);
  EXPECT_EQ(parse_text("X..\n..O\n.X."), b);
  std::mt19937_64 rng(15);
  for (int i = 0; i < 200; ++i) {
    const Board r = oracle::random_cells(1 + i % 16, rng);
    const std::string t = to_text(r);
    ASSERT_EQ(parse_text(t), r);
    ASSERT_EQ(to_text(parse_text(t)), t);
  }
}

TEST(Text, RejectsMalformed)
{
  EXPECT_EQ(code_of([] { parse_text(""); }), errc::parse_error);
  EXPECT_EQ(code_of([] { parse_text("X.\n..\n.."); }), errc::parse_error);
  EXPECT_EQ(code_of([] { parse_text("X.Z\n...\n..."); }), errc::parse_error);
  EXPECT_EQ(code_of([] { parse_text("X..\n...\n"
                                    "..\n"); }),
            errc::parse_error);
}
