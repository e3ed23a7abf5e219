#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "transversal/core.hpp"
#include "transversal/transforms.hpp"

namespace transversal {

enum class CaseTag : std::uint8_t { Case1a, Case1b, Case2, Case3a, Case3b };

constexpr std::string_view to_string(CaseTag t) noexcept
{
  switch (t) {
  case CaseTag::Case1a: return "Case1a";
  case CaseTag::Case1b: return "Case1b";
  case CaseTag::Case2: return "Case2";
  case CaseTag::Case3a: return "Case3a";
  case CaseTag::Case3b: return "Case3b";
  }
  return "?";
}

struct Phase {
  enum class Kind : std::uint8_t {
    Opening,    // nothing played yet
    Base,       // first move made, waiting for the opponent's first reply
    Induction,  // induction invariant holds for `k`
    ThreatMove, // invariant holds for k = n-3; next move starts threatening
    AwaitBlock, // a single threat is pending at `pending`
    Endgame,    // scripted endgame for `tag`, at `step`
    Closing,    // a double threat is on the board; the next move wins
    Filler,     // script exhausted; play safe moves until the end
  };

  Kind kind = Kind::Opening;
  int k = 0;
  CaseTag tag = CaseTag::Case2;
  int step = 0;

  friend bool operator==(const Phase&, const Phase&) = default;
};

struct CaseData {
  int s = 0;
  std::optional<int> r;
  int b = 0;
  int c = 0;

  friend bool operator==(const CaseData&, const CaseData&) = default;
};

/// Live subgrid of the Maker-Breaker induction, in real 0-based indices.
struct SubgridState {
  RowMask rows = 0;
  RowMask cols = 0;
  std::optional<Cell> anchor; // real coordinates, held by X
  bool fresh = true;          // X to move on an empty subgrid

  friend bool operator==(const SubgridState&, const SubgridState&) = default;
};

/// Private state of a strategy. `frame` maps real coordinates to the proof's
/// normalized coordinates; the real board is never relabelled.
struct StrategyState {
  GoodTransform frame{1};
  Phase phase;
  std::optional<CaseData> case_data;
  /// Cell (frame coordinates) the opponent is expected to occupy next.
  std::optional<Cell> pending;
  /// Swap to apply once the pending block arrives: 0 none, 1 columns n-1/n,
  /// 2 both rows and columns n-1/n.
  int post_block = 0;
  /// Prop2 script: which branch of the case analysis is being followed.
  int branch = 0;
  SubgridState subgrid;
  std::uint64_t seed = 0;
  std::uint64_t moves_made = 0;
  /// Board right after this strategy's previous move.
  std::optional<Board> last_board;
  /// Number of structural assertions evaluated so far.
  std::uint64_t invariant_checks = 0;
};

struct Decision {
  Cell move;
  StrategyState state;
};

namespace detail {

inline void require(bool ok, StrategyState& st, const std::string& what)
{
  ++st.invariant_checks;
  if (!ok) throw error(errc::invariant_violation, what);
}

/// Cell the opponent added since our last move. Throws when the board does
/// not extend our own last position by exactly one opponent stone.
inline std::optional<Cell> observe_reply(const StrategyState& st, const Board& b, Player me,
                                         std::optional<Cell> claimed)
{
  if (!st.last_board) return std::nullopt;
  const Board& prev = *st.last_board;
  if (prev.size() != b.size()) throw error(errc::inconsistent_history, "board size changed");
  const Player them = opponent(me);
  std::optional<Cell> added;
  for (int r = 0; r < b.size(); ++r) {
    if (b.row(me, r) != prev.row(me, r)) throw error(errc::inconsistent_history, "own stones changed");
    const RowMask before = prev.row(them, r);
    const RowMask now = b.row(them, r);
    if ((before & ~now) != 0) throw error(errc::inconsistent_history, "opponent stone disappeared");
    const RowMask fresh = RowMask(now & ~before);
    if (!fresh) continue;
    if (added || std::popcount(unsigned(fresh)) != 1)
      throw error(errc::inconsistent_history, "more than one opponent move since last turn");
    added = Cell{r + 1, std::countr_zero(unsigned(fresh)) + 1};
  }
  if (!added) throw error(errc::inconsistent_history, "opponent has not moved");
  if (claimed && *claimed != *added)
    throw error(errc::inconsistent_history, "reported opponent move " + to_string(*claimed) +
                                                " does not match the board");
  return added;
}

inline std::optional<Cell> first_threat(const Board& b, Player p)
{
  const auto rows = threat_rows(b, p);
  for (int r = 0; r < b.size(); ++r)
    if (rows[r]) return Cell{r + 1, std::countr_zero(unsigned(rows[r])) + 1};
  return std::nullopt;
}

/// Win now, else block a single opposing threat, else the first empty cell.
inline Cell safe_filler(const Board& b, Player me)
{
  if (auto w = first_threat(b, me)) return *w;
  if (auto block = first_threat(b, opponent(me))) return *block;
  return b.empty_cells().front();
}

inline Decision finish(StrategyState st, const Board& b, Player me, Cell real_move)
{
  if (!b.contains(real_move) || !b.is_empty(real_move))
    throw error(errc::invariant_violation, "strategy chose unavailable cell " + to_string(real_move));
  st.last_board = b.placed(me, real_move);
  ++st.moves_made;
  return {real_move, std::move(st)};
}

inline bool contains_cell(const std::vector<Cell>& cells, Cell c)
{
  return std::find(cells.begin(), cells.end(), c) != cells.end();
}

} // namespace detail

} // namespace transversal
