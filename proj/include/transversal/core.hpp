#pragma once

#include <array>
#include <bit>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "transversal/error.hpp"

namespace transversal {

enum class Player : std::uint8_t { X, O };

constexpr Player opponent(Player p) noexcept { return p == Player::X ? Player::O : Player::X; }

constexpr char to_char(Player p) noexcept { return p == Player::X ? 'X' : 'O'; }

enum class Variant : std::uint8_t { Strong, MakerBreaker };

constexpr std::string_view to_string(Variant v) noexcept
{
  return v == Variant::Strong ? "strong" : "maker-breaker";
}

inline Variant parse_variant(std::string_view s)
{
  if (s == "strong" || s == "Strong") return Variant::Strong;
  if (s == "maker-breaker" || s == "makerbreaker" || s == "MakerBreaker" || s == "maker_breaker")
    return Variant::MakerBreaker;
  throw error(errc::invalid_argument, "unknown variant '" + std::string(s) + "'");
}

/// A grid cell, 1-indexed: row 1 is the top row, column 1 the leftmost.
struct Cell {
  int row = 1;
  int col = 1;

  friend auto operator<=>(const Cell&, const Cell&) = default;
};

inline std::string to_string(Cell c)
{
  return "(" + std::to_string(c.row) + "," + std::to_string(c.col) + ")";
}

enum class CellState : std::uint8_t { Empty, X, O };

using RowMask = std::uint16_t;

/// An n x n position. Rows are stored as one column bitmask per player, so
/// boards are cheap to copy and compare; every mutation-like operation
/// returns a new board.
class Board {
public:
  static constexpr int max_size = 16;

  explicit Board(int n) : n_(n)
  {
    if (n < 1 || n > max_size)
      throw error(errc::invalid_argument,
                  "board size must be in [1, " + std::to_string(max_size) + "], got " + std::to_string(n));
  }

  int size() const noexcept { return n_; }

  bool contains(Cell c) const noexcept { return c.row >= 1 && c.row <= n_ && c.col >= 1 && c.col <= n_; }

  CellState at(Cell c) const
  {
    check_bounds(c);
    const RowMask bit = RowMask(1u << (c.col - 1));
    if (x_[c.row - 1] & bit) return CellState::X;
    if (o_[c.row - 1] & bit) return CellState::O;
    return CellState::Empty;
  }

  bool is_empty(Cell c) const { return at(c) == CellState::Empty; }

  bool owns(Player p, Cell c) const
  {
    check_bounds(c);
    return (rows(p)[c.row - 1] >> (c.col - 1)) & 1u;
  }

  int stones(Player p) const noexcept { return p == Player::X ? x_count_ : o_count_; }

  int empty_count() const noexcept { return n_ * n_ - x_count_ - o_count_; }

  bool full() const noexcept { return empty_count() == 0; }

  /// Player whose turn it is under strict alternation starting with X.
  Player to_move() const noexcept { return x_count_ > o_count_ ? Player::O : Player::X; }

  /// True when the stone counts can arise from alternating play.
  bool counts_consistent() const noexcept
  {
    const int d = x_count_ - o_count_;
    return d == 0 || d == 1;
  }

  RowMask full_mask() const noexcept { return RowMask((1u << n_) - 1u); }

  /// Column mask of `p`'s stones in 0-based row `r`.
  RowMask row(Player p, int r) const noexcept { return rows(p)[r]; }

  RowMask occupied_row(int r) const noexcept { return RowMask(x_[r] | o_[r]); }

  RowMask empty_row(int r) const noexcept { return RowMask(full_mask() & ~occupied_row(r)); }

  const std::array<RowMask, max_size>& rows(Player p) const noexcept { return p == Player::X ? x_ : o_; }

  /// Unchecked-turn placement: the cell must be in range and empty.
  Board placed(Player p, Cell c) const
  {
    Board next = *this;
    next.place(p, c);
    return next;
  }

  void place(Player p, Cell c)
  {
    check_bounds(c);
    if (!is_empty(c)) throw error(errc::occupied_cell, "cell " + to_string(c) + " is occupied");
    auto& r = p == Player::X ? x_ : o_;
    r[c.row - 1] = RowMask(r[c.row - 1] | (1u << (c.col - 1)));
    ++(p == Player::X ? x_count_ : o_count_);
  }

  void clear(Cell c)
  {
    check_bounds(c);
    const RowMask bit = RowMask(1u << (c.col - 1));
    if (x_[c.row - 1] & bit) {
      x_[c.row - 1] = RowMask(x_[c.row - 1] & ~bit);
      --x_count_;
    } else if (o_[c.row - 1] & bit) {
      o_[c.row - 1] = RowMask(o_[c.row - 1] & ~bit);
      --o_count_;
    }
  }

  /// Empty cells in row-major order.
  std::vector<Cell> empty_cells() const
  {
    std::vector<Cell> out;
    out.reserve(std::size_t(empty_count()));
    for (int r = 0; r < n_; ++r)
      for (RowMask m = empty_row(r); m; m = RowMask(m & (m - 1)))
        out.push_back({r + 1, std::countr_zero(unsigned(m)) + 1});
    return out;
  }

  std::vector<Cell> cells_of(Player p) const
  {
    std::vector<Cell> out;
    for (int r = 0; r < n_; ++r)
      for (RowMask m = row(p, r); m; m = RowMask(m & (m - 1)))
        out.push_back({r + 1, std::countr_zero(unsigned(m)) + 1});
    return out;
  }

  friend bool operator==(const Board&, const Board&) = default;

private:
  void check_bounds(Cell c) const
  {
    if (!contains(c))
      throw error(errc::out_of_bounds, "cell " + to_string(c) + " outside " + std::to_string(n_) + "x" +
                                           std::to_string(n_) + " board");
  }

  int n_;
  int x_count_ = 0;
  int o_count_ = 0;
  std::array<RowMask, max_size> x_{};
  std::array<RowMask, max_size> o_{};
};

inline Board new_board(int n) { return Board(n); }

struct GameStatus {
  enum class Kind : std::uint8_t { InProgress, Won, Draw };

  Kind kind = Kind::InProgress;
  /// Side to move while in progress, winner once won.
  Player player = Player::X;
  /// Set when a Maker-Breaker game is decided before the board fills.
  bool adjudicated = false;

  static GameStatus in_progress(Player to_move) { return {Kind::InProgress, to_move, false}; }
  static GameStatus won(Player p, bool adjudicated = false) { return {Kind::Won, p, adjudicated}; }
  static GameStatus draw() { return {Kind::Draw, Player::X, false}; }

  bool is_over() const noexcept { return kind != Kind::InProgress; }
  bool is_won_by(Player p) const noexcept { return kind == Kind::Won && player == p; }

  friend bool operator==(const GameStatus&, const GameStatus&) = default;
};

inline std::string to_string(const GameStatus& s)
{
  switch (s.kind) {
  case GameStatus::Kind::InProgress: return std::string("InProgress(") + to_char(s.player) + ")";
  case GameStatus::Kind::Won: return std::string("Won(") + to_char(s.player) + (s.adjudicated ? ", adjudicated)" : ")");
  case GameStatus::Kind::Draw: return "Draw";
  }
  return "?";
}

namespace detail {

/// Maximum bipartite matching between rows and columns, adjacency given as
/// one column mask per row. Kuhn's augmenting paths over bitmasks.
struct Matching {
  int size = 0;
  std::array<std::int8_t, Board::max_size> col_of_row;
  std::array<std::int8_t, Board::max_size> row_of_col;

  Matching()
  {
    col_of_row.fill(-1);
    row_of_col.fill(-1);
  }
};

inline bool augment(int r, const std::array<RowMask, Board::max_size>& adj, unsigned& seen, Matching& m)
{
  for (unsigned avail = adj[r] & ~seen; avail; avail &= avail - 1) {
    const int c = std::countr_zero(avail);
    seen |= 1u << c;
    if (m.row_of_col[c] < 0 || augment(m.row_of_col[c], adj, seen, m)) {
      m.row_of_col[c] = std::int8_t(r);
      m.col_of_row[r] = std::int8_t(c);
      return true;
    }
  }
  return false;
}

inline Matching maximum_matching(const std::array<RowMask, Board::max_size>& adj, int n)
{
  Matching m;
  // Greedy seed, then augment the rest.
  unsigned used = 0;
  for (int r = 0; r < n; ++r) {
    const unsigned avail = adj[r] & ~used;
    if (avail) {
      const int c = std::countr_zero(avail);
      used |= 1u << c;
      m.col_of_row[r] = std::int8_t(c);
      m.row_of_col[c] = std::int8_t(r);
      ++m.size;
    }
  }
  for (int r = 0; r < n && m.size < n; ++r) {
    if (m.col_of_row[r] >= 0) continue;
    unsigned seen = 0;
    if (augment(r, adj, seen, m)) ++m.size;
  }
  return m;
}

/// Rows not owned by the opponent: the player's stones plus empty cells.
inline std::array<RowMask, Board::max_size> available_rows(const Board& b, Player p)
{
  std::array<RowMask, Board::max_size> adj{};
  const auto& theirs = b.rows(opponent(p));
  for (int r = 0; r < b.size(); ++r) adj[r] = RowMask(b.full_mask() & ~theirs[r]);
  return adj;
}

/// Threat cells as one column mask per row.
///
/// With a maximum matching of size n-1 there is one free row and one free
/// column. Adding the edge (r, c) completes a perfect matching exactly when r
/// is reachable from the free row and c from the free column by alternating
/// paths; those two reachable sets are disjoint from each other's
/// neighbourhoods, so the threats are their product restricted to empties.
inline std::array<RowMask, Board::max_size> threat_rows(const Board& b, Player p)
{
  std::array<RowMask, Board::max_size> out{};
  const int n = b.size();
  const auto& adj = b.rows(p);
  const Matching m = maximum_matching(adj, n);
  if (m.size == n) {
    for (int r = 0; r < n; ++r) out[r] = b.empty_row(r);
    return out;
  }
  if (m.size < n - 1) return out;

  int free_row = 0;
  while (m.col_of_row[free_row] >= 0) ++free_row;
  int free_col = 0;
  while (m.row_of_col[free_col] >= 0) ++free_col;

  unsigned rows_reach = 1u << free_row;
  int stack[Board::max_size];
  int top = 0;
  stack[top++] = free_row;
  unsigned cols_seen = 0;
  while (top) {
    const int r = stack[--top];
    for (unsigned cs = adj[r] & ~cols_seen; cs; cs &= cs - 1) {
      const int c = std::countr_zero(cs);
      cols_seen |= 1u << c;
      const int nr = m.row_of_col[c];
      if (nr >= 0 && !(rows_reach & (1u << nr))) {
        rows_reach |= 1u << nr;
        stack[top++] = nr;
      }
    }
  }

  unsigned cols_reach = 1u << free_col;
  top = 0;
  stack[top++] = free_col;
  unsigned rows_seen = 0;
  while (top) {
    const int c = stack[--top];
    for (int r = 0; r < n; ++r) {
      if ((rows_seen >> r) & 1u) continue;
      if (!((adj[r] >> c) & 1u)) continue;
      rows_seen |= 1u << r;
      const int nc = m.col_of_row[r];
      if (nc >= 0 && !(cols_reach & (1u << nc))) {
        cols_reach |= 1u << nc;
        stack[top++] = nc;
      }
    }
  }

  for (int r = 0; r < n; ++r)
    if ((rows_reach >> r) & 1u) out[r] = RowMask(cols_reach & b.empty_row(r));
  return out;
}

inline int count_cells(const std::array<RowMask, Board::max_size>& rows, int n)
{
  int total = 0;
  for (int r = 0; r < n; ++r) total += std::popcount(unsigned(rows[r]));
  return total;
}

inline std::vector<Cell> to_cells(const std::array<RowMask, Board::max_size>& rows, int n)
{
  std::vector<Cell> out;
  for (int r = 0; r < n; ++r)
    for (unsigned m = rows[r]; m; m &= m - 1) out.push_back({r + 1, std::countr_zero(m) + 1});
  return out;
}

} // namespace detail

/// Size of the largest set of `player`'s cells with no two sharing a row or
/// column.
inline int max_transversal_matching(const Board& b, Player player)
{
  return detail::maximum_matching(b.rows(player), b.size()).size;
}

inline bool has_won(const Board& b, Player player) { return max_transversal_matching(b, player) == b.size(); }

/// Empty cells on which `player` would complete a transversal, row-major.
inline std::vector<Cell> threats(const Board& b, Player player)
{
  return detail::to_cells(detail::threat_rows(b, player), b.size());
}

inline int threat_count(const Board& b, Player player)
{
  return detail::count_cells(detail::threat_rows(b, player), b.size());
}

/// Whether some transversal avoids every opponent stone.
inline bool can_ever_win(const Board& b, Player player)
{
  return detail::maximum_matching(detail::available_rows(b, player), b.size()).size == b.size();
}

inline GameStatus game_status(const Board& b, Variant variant)
{
  const bool x_won = has_won(b, Player::X);
  if (variant == Variant::MakerBreaker) {
    if (x_won) return GameStatus::won(Player::X);
    if (b.full()) return GameStatus::won(Player::O);
    if (!can_ever_win(b, Player::X)) return GameStatus::won(Player::O, true);
    return GameStatus::in_progress(b.to_move());
  }
  const bool o_won = has_won(b, Player::O);
  // Only the mover's stones change, so both cannot complete on one move.
  if (x_won && o_won)
    throw error(errc::inconsistent_position, "both players own a transversal");
  if (x_won) return GameStatus::won(Player::X);
  if (o_won) return GameStatus::won(Player::O);
  if (b.full()) return GameStatus::draw();
  return GameStatus::in_progress(b.to_move());
}

/// Checked move: bounds, game over, turn order, occupancy, in that order.
inline Board apply_move(const Board& b, Player player, Cell cell, Variant variant = Variant::Strong)
{
  if (!b.contains(cell))
    throw error(errc::out_of_bounds, "cell " + to_string(cell) + " outside the board");
  if (game_status(b, variant).is_over()) throw error(errc::game_over, "game is already decided");
  if (b.to_move() != player)
    throw error(errc::wrong_turn, std::string("it is ") + to_char(b.to_move()) + "'s turn");
  if (!b.is_empty(cell)) throw error(errc::occupied_cell, "cell " + to_string(cell) + " is occupied");
  return b.placed(player, cell);
}

// Text positions: n lines of n characters from ".XO", row 1 first, each line
// terminated by '\n'.

inline std::string to_text(const Board& b)
{
  std::string out;
  out.reserve(std::size_t(b.size() * (b.size() + 1)));
  for (int r = 1; r <= b.size(); ++r) {
    for (int c = 1; c <= b.size(); ++c) {
      switch (b.at({r, c})) {
      case CellState::Empty: out += '.'; break;
      case CellState::X: out += 'X'; break;
      case CellState::O: out += 'O'; break;
      }
    }
    out += '\n';
  }
  return out;
}

inline Board parse_text(std::string_view text)
{
  std::vector<std::string_view> lines;
  std::size_t start = 0;
  while (start < text.size()) {
    const std::size_t nl = text.find('\n', start);
    if (nl == std::string_view::npos) {
      lines.push_back(text.substr(start));
      break;
    }
    lines.push_back(text.substr(start, nl - start));
    start = nl + 1;
  }
  if (lines.empty()) throw error(errc::parse_error, "empty position text");
  const int n = int(lines.size());
  if (n > Board::max_size) throw error(errc::parse_error, "too many rows");
  Board b(n);
  for (int r = 0; r < n; ++r) {
    if (int(lines[r].size()) != n)
      throw error(errc::parse_error, "row " + std::to_string(r + 1) + " has " + std::to_string(lines[r].size()) +
                                         " characters, expected " + std::to_string(n));
    for (int c = 0; c < n; ++c) {
      switch (lines[r][c]) {
      case '.': break;
      case 'X': b.place(Player::X, {r + 1, c + 1}); break;
      case 'O': b.place(Player::O, {r + 1, c + 1}); break;
      default:
        throw error(errc::parse_error, std::string("unexpected character '") + lines[r][c] + "' in row " +
                                           std::to_string(r + 1));
      }
    }
  }
  return b;
}

} // namespace transversal
