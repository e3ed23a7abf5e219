#pragma once

#include <algorithm>
#include <cstdint>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "transversal/record.hpp"
#include "transversal/solver.hpp"
#include "transversal/strategy.hpp"

namespace transversal {

enum class AdversaryMode : std::uint8_t { Exhaustive, Random };

struct ResultHistogram {
  std::uint64_t win = 0;
  std::uint64_t draw = 0;
  std::uint64_t loss = 0;

  friend bool operator==(const ResultHistogram&, const ResultHistogram&) = default;
};

/// Outcome of playing one strategy against an adversary. Win/draw/loss are
/// from the strategy's point of view.
struct VerificationReport {
  std::string strategy;
  int n = 0;
  Variant variant = Variant::Strong;
  AdversaryMode mode = AdversaryMode::Exhaustive;
  std::optional<std::uint64_t> seed;
  std::uint64_t games_played = 0;
  ResultHistogram results;
  int max_x_moves_to_win = 0;
  std::uint64_t invariant_checks = 0;
  /// Independent line count: one plus (branching - 1) summed over adversary
  /// nodes. Equals games_played when the enumeration is complete.
  std::uint64_t expected_lines = 0;
  std::vector<GameRecord> violations;
  /// Why each violation was recorded, same order as `violations`.
  std::vector<std::string> violation_reasons;

  bool passed() const noexcept { return violations.empty(); }
};

struct VerifyOptions {
  /// Admit exhaustive runs that take hours (theorem1 and maker-breaker at n = 5).
  bool allow_long = false;
  /// Tighter bound on the winner's move count than the strategy claims.
  std::optional<int> max_x_moves;
};

namespace detail {

/// What a strategy promises: a win (optionally within a number of its own
/// moves) or at least a draw.
struct Claim {
  bool must_win = false;
  std::optional<int> max_x_moves;
};

inline Claim claim_for(const StrategyId& id, int n, Variant variant)
{
  switch (id.kind) {
  case StrategyKind::Theorem1: return {true, n + 3};
  case StrategyKind::MakerBreaker: return {true, std::nullopt};
  case StrategyKind::Prop2XDraw:
  case StrategyKind::Prop2ODraw: return {false, std::nullopt};
  case StrategyKind::SolverPerfect: {
    Solver s;
    const Value v = s.solve(Board(n), Player::X, variant).value;
    return {v == Value::FirstPlayerWin, std::nullopt};
  }
  case StrategyKind::Random: break;
  }
  throw error(errc::invalid_argument, "random play makes no claim to verify");
}

inline Player side_for(StrategyKind k) { return fixed_side(k).value_or(Player::X); }

class Verifier {
public:
  Verifier(StrategyId id, int n, Variant variant, const VerifyOptions& opts = {})
      : id_(id), n_(n), variant_(variant), side_(side_for(id.kind))
  {
    claim_ = claim_for(id, n, variant);
    if (opts.max_x_moves) claim_.max_x_moves = std::min(*opts.max_x_moves, claim_.max_x_moves.value_or(*opts.max_x_moves));
    report_.strategy = to_string(id);
    report_.n = n;
    report_.variant = variant;
  }

  VerificationReport& report() { return report_; }

  void exhaustive()
  {
    report_.mode = AdversaryMode::Exhaustive;
    report_.expected_lines = 1;
    std::vector<MoveRecord> line;
    explore(Board(n_), Engine(id_, n_, variant_, side_), std::nullopt, line);
    finalize();
  }

  void random(std::uint64_t games, std::uint64_t seed)
  {
    report_.mode = AdversaryMode::Random;
    report_.seed = seed;
    report_.expected_lines = games;
    for (std::uint64_t g = 0; g < games; ++g) {
      std::seed_seq seq{std::uint32_t(seed), std::uint32_t(seed >> 32), std::uint32_t(g), std::uint32_t(g >> 32)};
      std::mt19937_64 rng(seq);
      play_random(rng);
    }
    finalize();
  }

private:
  void explore(const Board& b, Engine engine, std::optional<Cell> last, std::vector<MoveRecord>& line)
  {
    const GameStatus st = game_status(b, variant_);
    if (st.is_over()) {
      leaf(st, line, engine);
      return;
    }
    if (st.player == side_) {
      Board next = b;
      Cell move;
      try {
        move = engine.next(b, last);
        next = apply_move(b, side_, move, variant_);
      } catch (const error& e) {
        failure(line, engine, e.what());
        return;
      }
      line.push_back({side_, move});
      explore(next, std::move(engine), move, line);
      line.pop_back();
      return;
    }
    const auto replies = b.empty_cells();
    report_.expected_lines += replies.size() - 1;
    for (Cell c : replies) {
      line.push_back({opponent(side_), c});
      explore(b.placed(opponent(side_), c), engine, c, line);
      line.pop_back();
    }
  }

  void play_random(std::mt19937_64& rng)
  {
    Board b(n_);
    Engine engine(id_, n_, variant_, side_);
    std::vector<MoveRecord> line;
    std::optional<Cell> last;
    for (;;) {
      const GameStatus st = game_status(b, variant_);
      if (st.is_over()) {
        leaf(st, line, engine);
        return;
      }
      Cell move;
      if (st.player == side_) {
        try {
          move = engine.next(b, last);
          b = apply_move(b, side_, move, variant_);
        } catch (const error& e) {
          failure(line, engine, e.what());
          return;
        }
      } else {
        const auto empties = b.empty_cells();
        std::uniform_int_distribution<std::size_t> pick(0, empties.size() - 1);
        move = empties[pick(rng)];
        b = b.placed(st.player, move);
      }
      line.push_back({st.player, move});
      last = move;
    }
  }

  void leaf(const GameStatus& st, const std::vector<MoveRecord>& line, const Engine& engine)
  {
    ++report_.games_played;
    report_.invariant_checks += engine.state().invariant_checks;
    const int x_moves = int(std::count_if(line.begin(), line.end(), [](const MoveRecord& m) { return m.player == Player::X; }));
    bool ok = true;
    std::string why = "claim failed: " + to_string(st);
    if (st.kind == GameStatus::Kind::Draw) {
      ++report_.results.draw;
      ok = !claim_.must_win;
    } else if (st.player == side_) {
      ++report_.results.win;
      if (side_ == Player::X) {
        report_.max_x_moves_to_win = std::max(report_.max_x_moves_to_win, x_moves);
        if (claim_.max_x_moves && x_moves > *claim_.max_x_moves) {
          ok = false;
          why = "won in " + std::to_string(x_moves) + " X moves, bound " + std::to_string(*claim_.max_x_moves);
        }
      }
    } else {
      ++report_.results.loss;
      ok = false;
    }
    if (!ok) violations_.push_back({make_record(line, result_of(st)), why});
  }

  void failure(const std::vector<MoveRecord>& line, const Engine& engine, const std::string& why)
  {
    ++report_.games_played;
    ++report_.results.loss;
    report_.invariant_checks += engine.state().invariant_checks;
    violations_.push_back({make_record(line, std::nullopt), why});
  }

  GameRecord make_record(const std::vector<MoveRecord>& line, std::optional<GameResult> result) const
  {
    GameRecord rec;
    rec.n = n_;
    rec.variant = variant_;
    (side_ == Player::X ? rec.player_x : rec.player_o) = to_string(id_);
    (side_ == Player::X ? rec.player_o : rec.player_x) = report_.mode == AdversaryMode::Exhaustive ? "exhaustive" : "random";
    rec.moves = line;
    rec.result = result;
    return rec;
  }

  void finalize()
  {
    std::sort(violations_.begin(), violations_.end(), [](const auto& lhs, const auto& rhs) {
      const GameRecord& a = lhs.first;
      const GameRecord& b = rhs.first;
      return std::lexicographical_compare(a.moves.begin(), a.moves.end(), b.moves.begin(), b.moves.end(),
                                          [](const MoveRecord& x, const MoveRecord& y) {
                                            return std::tie(x.player, x.cell) < std::tie(y.player, y.cell);
                                          });
    });
    for (std::size_t i = 0; i < violations_.size(); ++i) {
      violations_[i].first.id = "violation-" + std::to_string(i + 1);
      report_.violations.push_back(std::move(violations_[i].first));
      report_.violation_reasons.push_back(std::move(violations_[i].second));
    }
    violations_.clear();
  }

  StrategyId id_;
  int n_;
  Variant variant_;
  Player side_;
  Claim claim_;
  VerificationReport report_;
  std::vector<std::pair<GameRecord, std::string>> violations_;
};

inline void check_pairing(const StrategyId& id, int n, Variant variant)
{
  // Construct once to run the engine's own parameter checks.
  Engine probe(id, n, variant, side_for(id.kind));
  (void)probe;
  if (id.kind == StrategyKind::Random) throw error(errc::invalid_argument, "random play makes no claim to verify");
}

} // namespace detail

inline VerificationReport verify_exhaustive(const std::string& strategy_id, int n, Variant variant,
                                            const VerifyOptions& opts = {})
{
  const StrategyId id = parse_strategy_id(strategy_id);
  detail::check_pairing(id, n, variant);
  int limit = 0;
  switch (id.kind) {
  case StrategyKind::Theorem1:
  case StrategyKind::MakerBreaker: limit = opts.allow_long ? 5 : 4; break;
  case StrategyKind::Prop2XDraw:
  case StrategyKind::Prop2ODraw:
  case StrategyKind::SolverPerfect: limit = 3; break;
  case StrategyKind::Random: break;
  }
  if (n > limit)
    throw error(errc::tractability_bound, "exhaustive verification of " + strategy_id + " is limited to n <= " +
                                              std::to_string(limit));
  detail::Verifier v(id, n, variant, opts);
  v.exhaustive();
  return std::move(v.report());
}

inline VerificationReport verify_random(const std::string& strategy_id, int n, Variant variant, std::uint64_t games,
                                        std::uint64_t seed, const VerifyOptions& opts = {})
{
  if (games < 1) throw error(errc::invalid_argument, "games must be at least 1");
  const StrategyId id = parse_strategy_id(strategy_id);
  detail::check_pairing(id, n, variant);
  detail::Verifier v(id, n, variant, opts);
  v.random(games, seed);
  return std::move(v.report());
}

struct CrossCheck {
  int n = 0;
  Variant variant = Variant::Strong;
  std::string position;
  Value expected = Value::Draw;
  Value actual = Value::Draw;
  std::uint64_t nodes = 0;
  std::chrono::nanoseconds elapsed{0};

  bool matches() const noexcept { return expected == actual; }
};

/// Solves the root position and compares it with the known value: draws at
/// n = 2, 3, a first-player win at n = 4, and a Maker win on 4x4 after the
/// corner opening.
inline CrossCheck cross_check_solver(int n, Variant variant, const SolveOptions& opts = {})
{
  CrossCheck out;
  out.n = n;
  out.variant = variant;
  Board b(n);
  Player to_move = Player::X;
  if (variant == Variant::Strong) {
    if (n < 2 || n > 4) throw error(errc::invalid_argument, "known strong values cover n = 2, 3, 4");
    out.expected = n == 4 ? Value::FirstPlayerWin : Value::Draw;
    out.position = "empty";
  } else {
    if (n != 4) throw error(errc::invalid_argument, "the known Maker-Breaker value is for n = 4");
    b = b.placed(Player::X, {1, 1});
    to_move = Player::O;
    out.expected = Value::FirstPlayerWin;
    out.position = "X(1,1)";
  }
  Solver s(opts);
  const SolveResult r = s.solve(b, to_move, variant);
  out.actual = r.value;
  out.nodes = r.nodes_visited;
  out.elapsed = r.elapsed;
  return out;
}

// Report formats

inline std::string_view to_string(AdversaryMode m) noexcept
{
  return m == AdversaryMode::Exhaustive ? "exhaustive" : "random";
}

inline nlohmann::ordered_json to_json(const VerificationReport& r)
{
  nlohmann::ordered_json j;
  j["strategy"] = r.strategy;
  j["n"] = r.n;
  j["variant"] = std::string(to_string(r.variant));
  j["mode"] = std::string(to_string(r.mode));
  if (r.seed) j["seed"] = *r.seed;
  j["games"] = r.games_played;
  j["results"] = {{"win", r.results.win}, {"draw", r.results.draw}, {"loss", r.results.loss}};
  j["max_x_moves"] = r.max_x_moves_to_win;
  j["invariant_checks"] = r.invariant_checks;
  j["expected_lines"] = r.expected_lines;
  nlohmann::ordered_json v = nlohmann::ordered_json::array();
  for (const auto& rec : r.violations) v.push_back(to_json(rec));
  j["violations"] = std::move(v);
  return j;
}

inline std::string to_text(const VerificationReport& r)
{
  std::ostringstream os;
  os << "strategy   " << r.strategy << "\n"
     << "n          " << r.n << "\n"
     << "variant    " << to_string(r.variant) << "\n"
     << "mode       " << to_string(r.mode);
  if (r.seed) os << " (seed " << *r.seed << ")";
  os << "\n"
     << "games      " << r.games_played << "\n"
     << "results    win " << r.results.win << ", draw " << r.results.draw << ", loss " << r.results.loss << "\n"
     << "max X moves to win " << r.max_x_moves_to_win << "\n"
     << "invariant checks   " << r.invariant_checks << "\n"
     << "violations " << r.violations.size() << "\n";
  for (std::size_t i = 0; i < r.violations.size(); ++i) {
    const GameRecord& rec = r.violations[i];
    os << "  " << rec.id << ":";
    for (const auto& m : rec.moves) os << ' ' << to_char(m.player) << to_string(m.cell);
    if (i < r.violation_reasons.size()) os << "  [" << r.violation_reasons[i] << "]";
    os << "\n";
  }
  return os.str();
}

} // namespace transversal
