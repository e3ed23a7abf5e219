#pragma once

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <numeric>
#include <span>
#include <vector>

#include "json.hpp"

#include "transversal/core.hpp"

namespace transversal {

/// A "good" transformation: optional reflection in the main diagonal
/// followed by independent row and column permutations. The action on a
/// cell is (a,b) -> (row_perm(a'), col_perm(b')) where (a',b') is (b,a) when
/// transposing and (a,b) otherwise. Every composition of reflections and
/// permutations has this normal form.
class GoodTransform {
public:
  explicit GoodTransform(int n = 1) : n_(n)
  {
    if (n < 1 || n > Board::max_size) throw error(errc::invalid_argument, "transform size out of range");
    for (int i = 0; i < Board::max_size; ++i) rows_[i] = cols_[i] = std::uint8_t(i);
  }

  /// Permutations are 1-based images: row_perm[i-1] is the image of row i.
  GoodTransform(int n, bool transpose, std::span<const int> row_perm, std::span<const int> col_perm)
      : GoodTransform(n)
  {
    transpose_ = transpose;
    assign(rows_, row_perm, "row");
    assign(cols_, col_perm, "column");
  }

  static GoodTransform identity(int n) { return GoodTransform(n); }

  static GoodTransform transposition(int n)
  {
    GoodTransform t(n);
    t.transpose_ = true;
    return t;
  }

  static GoodTransform row_swap(int n, int a, int b)
  {
    GoodTransform t(n);
    t.check_index(a);
    t.check_index(b);
    std::swap(t.rows_[a - 1], t.rows_[b - 1]);
    return t;
  }

  static GoodTransform col_swap(int n, int a, int b)
  {
    GoodTransform t(n);
    t.check_index(a);
    t.check_index(b);
    std::swap(t.cols_[a - 1], t.cols_[b - 1]);
    return t;
  }

  /// The same relabelling applied to rows and columns; keeps the diagonal.
  static GoodTransform relabel(int n, std::span<const int> perm) { return GoodTransform(n, false, perm, perm); }

  int size() const noexcept { return n_; }
  bool transposes() const noexcept { return transpose_; }

  /// 1-based image of row `a` (after the optional reflection).
  int row_image(int a) const noexcept { return rows_[a - 1] + 1; }
  int col_image(int b) const noexcept { return cols_[b - 1] + 1; }

  std::vector<int> row_perm() const { return to_vector(rows_); }
  std::vector<int> col_perm() const { return to_vector(cols_); }

  friend bool operator==(const GoodTransform& a, const GoodTransform& b)
  {
    if (a.n_ != b.n_ || a.transpose_ != b.transpose_) return false;
    for (int i = 0; i < a.n_; ++i)
      if (a.rows_[i] != b.rows_[i] || a.cols_[i] != b.cols_[i]) return false;
    return true;
  }

private:
  friend GoodTransform compose(const GoodTransform&, const GoodTransform&);
  friend GoodTransform invert(const GoodTransform&);

  void check_index(int i) const
  {
    if (i < 1 || i > n_) throw error(errc::out_of_bounds, "index " + std::to_string(i) + " outside [1, n]");
  }

  void assign(std::array<std::uint8_t, Board::max_size>& dst, std::span<const int> perm, const char* what)
  {
    if (int(perm.size()) != n_)
      throw error(errc::dimension_mismatch, std::string(what) + " permutation has wrong length");
    unsigned seen = 0;
    for (int i = 0; i < n_; ++i) {
      const int v = perm[i];
      if (v < 1 || v > n_ || ((seen >> (v - 1)) & 1u))
        throw error(errc::invalid_argument, std::string(what) + " permutation is not a bijection on [1, n]");
      seen |= 1u << (v - 1);
      dst[i] = std::uint8_t(v - 1);
    }
  }

  std::vector<int> to_vector(const std::array<std::uint8_t, Board::max_size>& a) const
  {
    std::vector<int> out(static_cast<std::size_t>(n_));
    for (int i = 0; i < n_; ++i) out[i] = a[i] + 1;
    return out;
  }

  int n_;
  bool transpose_ = false;
  std::array<std::uint8_t, Board::max_size> rows_{};
  std::array<std::uint8_t, Board::max_size> cols_{};
};

inline Cell map_cell(const GoodTransform& t, Cell c)
{
  if (c.row < 1 || c.row > t.size() || c.col < 1 || c.col > t.size())
    throw error(errc::dimension_mismatch, "cell " + to_string(c) + " not on a " + std::to_string(t.size()) + "-grid");
  const int a = t.transposes() ? c.col : c.row;
  const int b = t.transposes() ? c.row : c.col;
  return {t.row_image(a), t.col_image(b)};
}

inline Board apply(const GoodTransform& t, const Board& b)
{
  if (t.size() != b.size()) throw error(errc::dimension_mismatch, "transform and board sizes differ");
  Board out(b.size());
  for (Player p : {Player::X, Player::O})
    for (Cell c : b.cells_of(p)) out.place(p, map_cell(t, c));
  return out;
}

/// `t2` first, then `t1`.
inline GoodTransform compose(const GoodTransform& t1, const GoodTransform& t2)
{
  if (t1.n_ != t2.n_) throw error(errc::dimension_mismatch, "cannot compose transforms of different sizes");
  GoodTransform out(t1.n_);
  out.transpose_ = t1.transpose_ != t2.transpose_;
  // A reflection in t1 swaps which of t2's permutations feeds each axis.
  const auto& into_rows = t1.transpose_ ? t2.cols_ : t2.rows_;
  const auto& into_cols = t1.transpose_ ? t2.rows_ : t2.cols_;
  for (int i = 0; i < t1.n_; ++i) {
    out.rows_[i] = t1.rows_[into_rows[i]];
    out.cols_[i] = t1.cols_[into_cols[i]];
  }
  return out;
}

inline GoodTransform invert(const GoodTransform& t)
{
  GoodTransform out(t.n_);
  out.transpose_ = t.transpose_;
  std::array<std::uint8_t, Board::max_size> rinv{}, cinv{};
  for (int i = 0; i < t.n_; ++i) {
    rinv[t.rows_[i]] = std::uint8_t(i);
    cinv[t.cols_[i]] = std::uint8_t(i);
  }
  if (t.transpose_) {
    out.rows_ = cinv;
    out.cols_ = rinv;
  } else {
    out.rows_ = rinv;
    out.cols_ = cinv;
  }
  return out;
}

inline void to_json(nlohmann::json& j, const GoodTransform& t)
{
  j = nlohmann::json{{"transpose", t.transposes()}, {"row_perm", t.row_perm()}, {"col_perm", t.col_perm()}};
}

inline GoodTransform transform_from_json(const nlohmann::json& j)
{
  const auto rows = j.at("row_perm").get<std::vector<int>>();
  const auto cols = j.at("col_perm").get<std::vector<int>>();
  if (rows.size() != cols.size()) throw error(errc::dimension_mismatch, "row/col permutation lengths differ");
  return GoodTransform(int(rows.size()), j.at("transpose").get<bool>(), rows, cols);
}

// Position keys

enum class KeyMode : std::uint8_t { Raw, Exact };

/// Row-sequence encoding of a position: each row packs the X mask in the low
/// 16 bits and the O mask in the high 16. Ordered lexicographically.
struct PositionKey {
  std::uint8_t n = 0;
  std::array<std::uint32_t, Board::max_size> rows{};

  friend auto operator<=>(const PositionKey&, const PositionKey&) = default;
};

inline constexpr int default_exact_key_bound = 5;

namespace detail {

inline RowMask permute_mask(RowMask m, const std::array<std::uint8_t, Board::max_size>& perm)
{
  RowMask out = 0;
  for (unsigned bits = m; bits; bits &= bits - 1) out = RowMask(out | (1u << perm[std::countr_zero(bits)]));
  return out;
}

inline PositionKey raw_key(const Board& b)
{
  PositionKey k;
  k.n = std::uint8_t(b.size());
  for (int r = 0; r < b.size(); ++r)
    k.rows[r] = std::uint32_t(b.row(Player::X, r)) | (std::uint32_t(b.row(Player::O, r)) << 16);
  return k;
}

} // namespace detail

/// Raw: injective encoding of the position. Exact: the minimum encoding over
/// all 2 * n! * n! good transforms, so two boards share an exact key iff one
/// is a good transform of the other. Minimising over row permutations is
/// sorting the rows, so only the reflection and column permutations are
/// enumerated.
inline PositionKey canonical_key(const Board& b, KeyMode mode, int exact_bound = default_exact_key_bound)
{
  if (mode == KeyMode::Raw) return detail::raw_key(b);
  const int n = b.size();
  if (n > exact_bound)
    throw error(errc::tractability_bound, "exact canonical keys limited to n <= " + std::to_string(exact_bound));

  std::array<RowMask, Board::max_size> xs[2]{}, os[2]{};
  for (int r = 0; r < n; ++r) {
    xs[0][r] = b.row(Player::X, r);
    os[0][r] = b.row(Player::O, r);
  }
  // Transposed rows.
  for (int r = 0; r < n; ++r)
    for (int c = 0; c < n; ++c) {
      if ((xs[0][r] >> c) & 1u) xs[1][c] = RowMask(xs[1][c] | (1u << r));
      if ((os[0][r] >> c) & 1u) os[1][c] = RowMask(os[1][c] | (1u << r));
    }

  PositionKey best;
  best.n = std::uint8_t(n);
  best.rows.fill(~0u);
  std::array<std::uint8_t, Board::max_size> perm{};
  std::array<std::uint32_t, Board::max_size> cand{};
  for (int t = 0; t < 2; ++t) {
    std::iota(perm.begin(), perm.begin() + n, std::uint8_t(0));
    do {
      for (int r = 0; r < n; ++r)
        cand[r] = std::uint32_t(detail::permute_mask(xs[t][r], perm)) |
                  (std::uint32_t(detail::permute_mask(os[t][r], perm)) << 16);
      std::sort(cand.begin(), cand.begin() + n);
      if (std::lexicographical_compare(cand.begin(), cand.begin() + n, best.rows.begin(), best.rows.begin() + n))
        std::copy(cand.begin(), cand.begin() + n, best.rows.begin());
    } while (std::next_permutation(perm.begin(), perm.begin() + n));
  }
  for (int r = n; r < Board::max_size; ++r) best.rows[r] = 0;
  return best;
}

} // namespace transversal
