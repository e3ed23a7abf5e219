#include <gtest/gtest.h>

#include "transversal/harness.hpp"

using namespace transversal;

namespace {

/// Number of complete games when `side` follows the engine and the other
/// side tries every empty cell.
std::uint64_t count_lines(const Board& b, Engine e, Player side, Variant v, std::optional<Cell> last)
{
  const GameStatus st = game_status(b, v);
  if (st.is_over()) return 1;
  if (st.player == side) {
    const Cell m = e.next(b, last);
    return count_lines(b.placed(side, m), e, side, v, m);
  }
  std::uint64_t total = 0;
  for (Cell c : b.empty_cells()) total += count_lines(b.placed(st.player, c), e, side, v, c);
  return total;
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

TEST(Harness, Theorem1Exhaustive4)
{
  const VerificationReport r = verify_exhaustive("theorem1", 4, Variant::Strong);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.results.win, r.games_played);
  EXPECT_LE(r.max_x_moves_to_win, 7);
  EXPECT_GT(r.invariant_checks, 0u);
  EXPECT_EQ(r.games_played, r.expected_lines);
  const Engine e(parse_strategy_id("theorem1"), 4, Variant::Strong, Player::X);
  EXPECT_EQ(r.games_played, count_lines(Board(4), e, Player::X, Variant::Strong, std::nullopt));
}

TEST(Harness, Prop2Exhaustive)
{
  for (const char* id : {"prop2-x-draw", "prop2-o-draw"}) {
    const VerificationReport r = verify_exhaustive(id, 3, Variant::Strong);
    EXPECT_TRUE(r.passed()) << id;
    EXPECT_EQ(r.results.loss, 0u) << id;
    EXPECT_EQ(r.games_played, r.expected_lines);
    const Player side = *fixed_side(parse_strategy_id(id).kind);
    const Engine e(parse_strategy_id(id), 3, Variant::Strong, side);
    EXPECT_EQ(r.games_played, count_lines(Board(3), e, side, Variant::Strong, std::nullopt));
  }
}

TEST(Harness, MakerBreakerExhaustive4)
{
  const VerificationReport r = verify_exhaustive("maker-breaker", 4, Variant::MakerBreaker);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.results.win, r.games_played);
}

TEST(Harness, SolverPerfectExhaustive3)
{
  const VerificationReport r = verify_exhaustive("solver-perfect", 3, Variant::Strong);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.results.loss, 0u);
}

TEST(Harness, RandomRuns)
{
  const VerificationReport t = verify_random("theorem1", 6, Variant::Strong, 1000, 1);
  EXPECT_TRUE(t.passed());
  EXPECT_EQ(t.results.win, 1000u);
  EXPECT_LE(t.max_x_moves_to_win, 9);
  const VerificationReport m = verify_random("maker-breaker", 5, Variant::MakerBreaker, 1000, 7);
  EXPECT_TRUE(m.passed());
  EXPECT_EQ(m.results.win, 1000u);
}

TEST(Harness, Reproducible)
{
  const auto a = to_json(verify_random("theorem1", 7, Variant::Strong, 300, 42)).dump();
  const auto b = to_json(verify_random("theorem1", 7, Variant::Strong, 300, 42)).dump();
  EXPECT_EQ(a, b);
  EXPECT_EQ(to_text(verify_exhaustive("prop2-o-draw", 3, Variant::Strong)),
            to_text(verify_exhaustive("prop2-o-draw", 3, Variant::Strong)));
  const auto c = to_json(verify_random("theorem1", 7, Variant::Strong, 300, 43)).dump();
  EXPECT_NE(a, c);
}

TEST(Harness, ViolationsReplay)
{
  VerifyOptions tight;
  tight.max_x_moves = 5;
  const VerificationReport r = verify_exhaustive("theorem1", 4, Variant::Strong, tight);
  ASSERT_FALSE(r.passed());
  ASSERT_EQ(r.violations.size(), r.violation_reasons.size());
  for (std::size_t i = 0; i < r.violations.size(); ++i) {
    const GameRecord& rec = r.violations[i];
    EXPECT_NO_THROW(verify_record(rec));
    const Board end = replay(rec);
    EXPECT_TRUE(game_status(end, Variant::Strong).is_won_by(Player::X));
    int x_moves = 0;
    for (const MoveRecord& m : rec.moves) x_moves += m.player == Player::X;
    EXPECT_GT(x_moves, 5);
    EXPECT_LE(x_moves, 7);
    EXPECT_EQ(rec.id, "violation-" + std::to_string(i + 1));
  }
  const auto j = to_json(r);
  EXPECT_EQ(j["violations"].size(), r.violations.size());
  EXPECT_EQ(parse_record(j["violations"][0].dump()), r.violations[0]);
}

TEST(Harness, ReportFields)
{
  const auto j = to_json(verify_random("theorem1", 5, Variant::Strong, 10, 3));
  for (const char* k : {"strategy", "n", "variant", "mode", "seed", "games", "results", "max_x_moves", "violations"})
    EXPECT_TRUE(j.contains(k)) << k;
  const auto e = to_json(verify_exhaustive("prop2-x-draw", 3, Variant::Strong));
  EXPECT_FALSE(e.contains("seed"));
}

TEST(Harness, RejectsBadParameters)
{
  EXPECT_EQ(code_of([] { verify_random("theorem1", 5, Variant::Strong, 0, 1); }), errc::invalid_argument);
  EXPECT_EQ(code_of([] { verify_random("random(1)", 5, Variant::Strong, 10, 1); }), errc::invalid_argument);
  EXPECT_EQ(code_of([] { verify_exhaustive("theorem1", 5, Variant::Strong); }), errc::tractability_bound);
  EXPECT_EQ(code_of([] { verify_exhaustive("theorem1", 4, Variant::MakerBreaker); }), errc::invalid_argument);
  EXPECT_EQ(code_of([] { verify_exhaustive("nope", 4, Variant::Strong); }), errc::invalid_argument);
}

TEST(Harness, CrossCheckSolver)
{
  for (int n : {2, 3, 4}) {
    const CrossCheck c = cross_check_solver(n, Variant::Strong);
    EXPECT_TRUE(c.matches()) << n;
  }
  EXPECT_EQ(cross_check_solver(3, Variant::Strong).actual, Value::Draw);
  EXPECT_EQ(cross_check_solver(4, Variant::Strong).actual, Value::FirstPlayerWin);
  EXPECT_TRUE(cross_check_solver(4, Variant::MakerBreaker).matches());
}
