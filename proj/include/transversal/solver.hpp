#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "transversal/core.hpp"
#include "transversal/transforms.hpp"

namespace transversal {

enum class Value : std::uint8_t { FirstPlayerWin, SecondPlayerWin, Draw };

constexpr std::string_view to_string(Value v) noexcept
{
  switch (v) {
  case Value::FirstPlayerWin: return "FirstPlayerWin";
  case Value::SecondPlayerWin: return "SecondPlayerWin";
  case Value::Draw: return "Draw";
  }
  return "?";
}

inline Value parse_value(std::string_view s)
{
  if (s == "FirstPlayerWin") return Value::FirstPlayerWin;
  if (s == "SecondPlayerWin") return Value::SecondPlayerWin;
  if (s == "Draw") return Value::Draw;
  throw error(errc::parse_error, "unknown value '" + std::string(s) + "'");
}

struct SolveOptions {
  /// Key positions near the root by their exact canonical form.
  bool symmetry = false;
  /// Positions with at most this many stones use canonical keys.
  int symmetry_stones = 6;
  /// Largest n for which canonical keys are used.
  int symmetry_max_n = 4;
  /// 0 means unlimited.
  std::uint64_t node_limit = 0;
  /// Memo entries; 0 disables memoization.
  std::size_t memo_capacity = std::size_t(1) << 21;
  /// Root-split worker count; 1 gives deterministic node counts.
  int threads = 1;
  /// Full-game solves are accepted up to this n.
  int max_full_n = 4;
  /// Larger boards are accepted with at most this many empty cells.
  int max_empty_cells = 16;
};

struct SolveResult {
  Value value = Value::Draw;
  std::optional<Cell> best_move;
  std::uint64_t nodes_visited = 0;
  std::uint64_t table_hits = 0;
  std::chrono::nanoseconds elapsed{0};
};

/// Raised when the node budget runs out; carries the work done so far so the
/// caller can report it, but never a value.
class node_limit_exceeded : public error {
public:
  node_limit_exceeded(std::uint64_t nodes, std::chrono::nanoseconds elapsed)
      : error(errc::node_limit_exceeded, "node limit reached after " + std::to_string(nodes) + " nodes"),
        nodes_(nodes), elapsed_(elapsed)
  {
  }
  std::uint64_t nodes_visited() const noexcept { return nodes_; }
  std::chrono::nanoseconds elapsed() const noexcept { return elapsed_; }

private:
  std::uint64_t nodes_;
  std::chrono::nanoseconds elapsed_;
};

namespace detail {

/// Packed exact key for boards up to 8x8: row r occupies bits [r*n, r*n+n).
struct CompactKey {
  std::uint64_t x = 0;
  std::uint64_t o = 0;
  std::uint8_t tag = 0; // mover | variant << 1

  friend bool operator==(const CompactKey&, const CompactKey&) = default;
};

inline CompactKey compact_key(const Board& b, Player mover, Variant v)
{
  CompactKey k;
  const int n = b.size();
  for (int r = 0; r < n; ++r) {
    k.x |= std::uint64_t(b.row(Player::X, r)) << (r * n);
    k.o |= std::uint64_t(b.row(Player::O, r)) << (r * n);
  }
  k.tag = std::uint8_t((mover == Player::O ? 1 : 0) | (v == Variant::MakerBreaker ? 2 : 0));
  return k;
}

inline CompactKey compact_key(const PositionKey& pk, Player mover, Variant v)
{
  CompactKey k;
  const int n = pk.n;
  for (int r = 0; r < n; ++r) {
    k.x |= std::uint64_t(pk.rows[r] & 0xFFFFu) << (r * n);
    k.o |= std::uint64_t(pk.rows[r] >> 16) << (r * n);
  }
  k.tag = std::uint8_t((mover == Player::O ? 1 : 0) | (v == Variant::MakerBreaker ? 2 : 0));
  return k;
}

enum class Bound : std::uint8_t { Exact, Lower, Upper };

struct MemoEntry {
  CompactKey key;
  bool used = false;
  std::int8_t score = 0;
  Bound bound = Bound::Exact;
  std::uint8_t depth = 0;
};

/// Two-way buckets: slot 0 keeps the deeper subtree, slot 1 always takes the
/// newest entry. A full table only costs re-search.
class MemoTable {
public:
  MemoTable(std::size_t capacity, bool concurrent)
  {
    if (capacity < 2) return;
    std::size_t buckets = 1;
    while (buckets * 2 * 2 <= capacity) buckets *= 2;
    slots_.resize(buckets * 2);
    mask_ = buckets - 1;
    if (concurrent) locks_ = std::make_unique<std::mutex[]>(lock_count);
  }

  bool enabled() const noexcept { return !slots_.empty(); }

  std::optional<MemoEntry> probe(const CompactKey& k) const
  {
    const std::size_t b = bucket(k);
    auto guard = lock(b);
    for (int i = 0; i < 2; ++i) {
      const MemoEntry& e = slots_[b * 2 + i];
      if (e.used && e.key == k) return e;
    }
    return std::nullopt;
  }

  void store(const MemoEntry& entry)
  {
    const std::size_t b = bucket(entry.key);
    auto guard = lock(b);
    MemoEntry& deep = slots_[b * 2];
    MemoEntry& recent = slots_[b * 2 + 1];
    if (deep.used && deep.key == entry.key) {
      deep = entry;
    } else if (!deep.used || entry.depth >= deep.depth) {
      if (deep.used) recent = deep;
      deep = entry;
    } else {
      recent = entry;
    }
  }

  void clear() { std::fill(slots_.begin(), slots_.end(), MemoEntry{}); }

private:
  static constexpr std::size_t lock_count = 256;

  std::size_t bucket(const CompactKey& k) const noexcept
  {
    std::uint64_t h = k.x * 0x9E3779B97F4A7C15ull ^ (k.o + 0x632BE59BD9B4E019ull) * 0xC2B2AE3D27D4EB4Full ^ k.tag;
    h ^= h >> 31;
    h *= 0xD6E8FEB86659FD93ull;
    h ^= h >> 32;
    return std::size_t(h) & mask_;
  }

  std::unique_lock<std::mutex> lock(std::size_t b) const
  {
    if (!locks_) return {};
    return std::unique_lock<std::mutex>(locks_[b % lock_count]);
  }

  std::vector<MemoEntry> slots_;
  std::size_t mask_ = 0;
  std::unique_ptr<std::mutex[]> locks_;
};

/// What can be decided about a node without searching its children.
struct Tactics {
  enum class Verdict : std::uint8_t { Open, Win, Loss, Draw, Terminal } verdict = Verdict::Open;
  int terminal_score = 0;
  std::optional<Cell> move; // winning cell or the single forced block
};

inline Tactics tactics(const Board& b, Player mover, Variant variant)
{
  Tactics t;
  const int n = b.size();
  const Player opp = opponent(mover);
  if (variant == Variant::Strong) {
    if (b.full()) {
      t.verdict = Tactics::Verdict::Terminal;
      return t;
    }
    const auto mine = threat_rows(b, mover);
    if (count_cells(mine, n)) {
      t.verdict = Tactics::Verdict::Win;
      t.move = to_cells(mine, n).front();
      return t;
    }
    const auto theirs = threat_rows(b, opp);
    const int their_count = count_cells(theirs, n);
    if (their_count >= 2) {
      t.verdict = Tactics::Verdict::Loss;
      t.move = to_cells(theirs, n).front();
      return t;
    }
    if (their_count == 1) {
      t.move = to_cells(theirs, n).front();
      return t;
    }
    if (!can_ever_win(b, Player::X) && !can_ever_win(b, Player::O)) t.verdict = Tactics::Verdict::Draw;
    return t;
  }

  // Maker-Breaker: only X completes transversals.
  if (b.full() || !can_ever_win(b, Player::X)) {
    t.verdict = Tactics::Verdict::Terminal;
    t.terminal_score = mover == Player::O ? 1 : -1;
    return t;
  }
  const auto maker = threat_rows(b, Player::X);
  const int maker_count = count_cells(maker, n);
  if (mover == Player::X) {
    if (maker_count) {
      t.verdict = Tactics::Verdict::Win;
      t.move = to_cells(maker, n).front();
    }
    return t;
  }
  if (maker_count >= 2) {
    t.verdict = Tactics::Verdict::Loss;
    t.move = to_cells(maker, n).front();
  } else if (maker_count == 1) {
    t.move = to_cells(maker, n).front();
  }
  return t;
}

/// Threat-creating cells first, then cells that grow the mover's matching,
/// then row-major.
inline std::vector<Cell> ordered_moves(const Board& b, Player mover)
{
  struct Scored {
    int threat;
    int gain;
    Cell cell;
  };
  const int base = max_transversal_matching(b, mover);
  std::vector<Scored> scored;
  for (Cell c : b.empty_cells()) {
    const Board child = b.placed(mover, c);
    const int m = max_transversal_matching(child, mover);
    const int threat = m >= b.size() - 1 && threat_count(child, mover) > 0 ? 1 : 0;
    scored.push_back({threat, m - base, c});
  }
  std::stable_sort(scored.begin(), scored.end(), [](const Scored& a, const Scored& b) {
    if (a.threat != b.threat) return a.threat > b.threat;
    return a.gain > b.gain;
  });
  std::vector<Cell> out;
  out.reserve(scored.size());
  for (const auto& s : scored) out.push_back(s.cell);
  return out;
}

inline Value absolute_value(int score, Player mover)
{
  if (score == 0) return Value::Draw;
  const bool x_wins = (score > 0) == (mover == Player::X);
  return x_wins ? Value::FirstPlayerWin : Value::SecondPlayerWin;
}

} // namespace detail

/// Exact perfect-play solver. The memo table persists across calls on the
/// same instance, which is sound because entries are keyed by position, side
/// to move and variant.
class Solver {
public:
  explicit Solver(SolveOptions opts = {})
      : opts_(opts), memo_(opts.memo_capacity, opts.threads > 1)
  {
  }

  const SolveOptions& options() const noexcept { return opts_; }

  SolveResult solve(const Board& b, Player to_move, Variant variant)
  {
    validate(b, to_move, variant);
    const auto start = std::chrono::steady_clock::now();
    nodes_ = 0;
    hits_ = 0;
    started_ = start;

    SolveResult res;
    const GameStatus st = game_status(b, variant);
    if (st.is_over()) {
      res.value = st.kind == GameStatus::Kind::Draw
                      ? Value::Draw
                      : (st.player == Player::X ? Value::FirstPlayerWin : Value::SecondPlayerWin);
      res.elapsed = std::chrono::steady_clock::now() - start;
      return res;
    }

    ++nodes_;
    const detail::Tactics t = detail::tactics(b, to_move, variant);
    int score = 0;
    std::optional<Cell> best;
    using V = detail::Tactics::Verdict;
    switch (t.verdict) {
    case V::Win:
      score = 1;
      best = t.move;
      break;
    case V::Loss:
      score = -1;
      best = t.move;
      break;
    case V::Draw:
      score = 0;
      best = detail::ordered_moves(b, to_move).front();
      break;
    case V::Terminal:
      // game_status already handled decided positions.
      throw error(errc::inconsistent_position, "unexpected terminal position");
    case V::Open: {
      std::vector<Cell> moves = t.move ? std::vector<Cell>{*t.move} : detail::ordered_moves(b, to_move);
      auto [s, m] = opts_.threads > 1 && moves.size() > 1 ? root_parallel(b, to_move, variant, moves)
                                                           : root_serial(b, to_move, variant, moves);
      score = s;
      best = m;
      break;
    }
    }
    res.value = detail::absolute_value(score, to_move);
    res.best_move = best;
    res.nodes_visited = nodes_.load();
    res.table_hits = hits_.load();
    res.elapsed = std::chrono::steady_clock::now() - start;
    return res;
  }

  /// Principal variation: follows best moves until the game ends.
  std::vector<Cell> best_line(const Board& b, Player to_move, Variant variant)
  {
    std::vector<Cell> line;
    Board cur = b;
    Player mover = to_move;
    for (;;) {
      const SolveResult r = solve(cur, mover, variant);
      if (!r.best_move) break;
      line.push_back(*r.best_move);
      cur = cur.placed(mover, *r.best_move);
      mover = opponent(mover);
    }
    return line;
  }

  void clear_memo() { memo_.clear(); }

private:
  void validate(const Board& b, Player to_move, Variant variant) const
  {
    if (variant == Variant::Strong && (!b.counts_consistent() || b.to_move() != to_move))
      throw error(errc::inconsistent_position, "stone counts do not allow " + std::string(1, to_char(to_move)) +
                                                   " to move");
    if (variant == Variant::MakerBreaker && b.stones(Player::O) > b.stones(Player::X) + 1)
      throw error(errc::inconsistent_position, "Breaker has more than one extra stone");
    if (b.size() > opts_.max_full_n && b.empty_count() > opts_.max_empty_cells)
      throw error(errc::tractability_bound, "n = " + std::to_string(b.size()) + " with " +
                                                std::to_string(b.empty_count()) +
                                                " empty cells is beyond the configured solve bound");
  }

  std::pair<int, std::optional<Cell>> root_serial(const Board& b, Player mover, Variant v,
                                                  const std::vector<Cell>& moves)
  {
    int alpha = -2;
    std::optional<Cell> best;
    for (Cell c : moves) {
      const int s = -negamax(b.placed(mover, c), opponent(mover), v, -2, -alpha);
      if (s > alpha) {
        alpha = s;
        best = c;
        if (alpha == 1) break;
      }
    }
    return {alpha, best};
  }

  std::pair<int, std::optional<Cell>> root_parallel(const Board& b, Player mover, Variant v,
                                                    const std::vector<Cell>& moves)
  {
    std::vector<int> scores(moves.size(), -2);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < moves.size();) {
        try {
          scores[i] = -negamax(b.placed(mover, moves[i]), opponent(mover), v, -2, 2);
        } catch (...) {
          std::lock_guard lk(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = moves.size();
        }
      }
    };
    {
      std::vector<std::jthread> pool;
      for (int i = 0; i < opts_.threads; ++i) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);
    std::size_t best = 0;
    for (std::size_t i = 1; i < moves.size(); ++i)
      if (scores[i] > scores[best]) best = i;
    return {scores[best], moves[best]};
  }

  detail::CompactKey key_for(const Board& b, Player mover, Variant v) const
  {
    const int stones = b.stones(Player::X) + b.stones(Player::O);
    if (opts_.symmetry && b.size() <= opts_.symmetry_max_n && stones <= opts_.symmetry_stones)
      return detail::compact_key(canonical_key(b, KeyMode::Exact, b.size()), mover, v);
    return detail::compact_key(b, mover, v);
  }

  int negamax(const Board& b, Player mover, Variant v, int alpha, int beta)
  {
    const std::uint64_t visited = nodes_.fetch_add(1, std::memory_order_relaxed) + 1;
    if (opts_.node_limit && visited > opts_.node_limit)
      throw node_limit_exceeded(visited - 1, std::chrono::steady_clock::now() - started_);

    const detail::Tactics t = detail::tactics(b, mover, v);
    using V = detail::Tactics::Verdict;
    switch (t.verdict) {
    case V::Win: return 1;
    case V::Loss: return -1;
    case V::Draw: return 0;
    case V::Terminal: return t.terminal_score;
    case V::Open: break;
    }

    const bool memo = memo_.enabled() && b.size() <= 8;
    detail::CompactKey key;
    if (memo) {
      key = key_for(b, mover, v);
      if (auto e = memo_.probe(key)) {
        if (e->bound == detail::Bound::Exact || (e->bound == detail::Bound::Lower && e->score >= beta) ||
            (e->bound == detail::Bound::Upper && e->score <= alpha)) {
          hits_.fetch_add(1, std::memory_order_relaxed);
          return e->score;
        }
      }
    }

    const int alpha0 = alpha;
    int best = -2;
    auto visit = [&](Cell c) {
      const int s = -negamax(b.placed(mover, c), opponent(mover), v, -beta, -alpha);
      if (s > best) best = s;
      if (s > alpha) alpha = s;
      return alpha >= beta;
    };
    if (t.move) {
      visit(*t.move);
    } else {
      for (Cell c : detail::ordered_moves(b, mover))
        if (visit(c)) break;
    }

    if (memo) {
      detail::MemoEntry e;
      e.key = key;
      e.used = true;
      e.score = std::int8_t(best);
      e.bound = best <= alpha0 ? detail::Bound::Upper : best >= beta ? detail::Bound::Lower : detail::Bound::Exact;
      e.depth = std::uint8_t(b.empty_count());
      memo_.store(e);
    }
    return best;
  }

  SolveOptions opts_;
  detail::MemoTable memo_;
  std::atomic<std::uint64_t> nodes_{0};
  std::atomic<std::uint64_t> hits_{0};
  std::chrono::steady_clock::time_point started_;
};

inline SolveResult solve(const Board& b, Player to_move, Variant variant, const SolveOptions& opts = {})
{
  Solver s(opts);
  return s.solve(b, to_move, variant);
}

inline std::vector<Cell> best_line(const Board& b, Player to_move, Variant variant, const SolveOptions& opts = {})
{
  Solver s(opts);
  return s.best_line(b, to_move, variant);
}

} // namespace transversal
