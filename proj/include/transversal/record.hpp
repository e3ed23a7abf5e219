#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

#include "transversal/core.hpp"

namespace transversal {

struct MoveRecord {
  Player player = Player::X;
  Cell cell;

  friend bool operator==(const MoveRecord&, const MoveRecord&) = default;
};

struct GameResult {
  std::optional<Player> winner; // empty means draw
  bool adjudicated = false;

  friend bool operator==(const GameResult&, const GameResult&) = default;
};

/// Serializable transcript of one game. `players` holds a strategy id or
/// "human" for X and O.
struct GameRecord {
  std::string id;
  int n = 3;
  Variant variant = Variant::Strong;
  std::string player_x = "human";
  std::string player_o = "human";
  std::vector<MoveRecord> moves;
  std::optional<GameResult> result;

  friend bool operator==(const GameRecord&, const GameRecord&) = default;
};

inline std::optional<GameResult> result_of(const GameStatus& st)
{
  switch (st.kind) {
  case GameStatus::Kind::InProgress: return std::nullopt;
  case GameStatus::Kind::Won: return GameResult{st.player, st.adjudicated};
  case GameStatus::Kind::Draw: return GameResult{std::nullopt, false};
  }
  return std::nullopt;
}

/// Replays the moves through the checked move function; throws on any
/// illegal or out-of-turn move.
inline Board replay(const GameRecord& rec)
{
  Board b(rec.n);
  for (const MoveRecord& m : rec.moves) b = apply_move(b, m.player, m.cell, rec.variant);
  return b;
}

/// Replay and confirm that the stored result matches the final position.
inline void verify_record(const GameRecord& rec)
{
  const Board b = replay(rec);
  const auto actual = result_of(game_status(b, rec.variant));
  if (actual != rec.result)
    throw error(errc::inconsistent_history, "stored result of game '" + rec.id + "' does not match its moves");
}

inline nlohmann::ordered_json to_json(const GameRecord& rec)
{
  nlohmann::ordered_json j;
  j["id"] = rec.id;
  j["n"] = rec.n;
  j["variant"] = std::string(to_string(rec.variant));
  j["players"] = {{"X", rec.player_x}, {"O", rec.player_o}};
  nlohmann::ordered_json moves = nlohmann::ordered_json::array();
  for (const MoveRecord& m : rec.moves)
    moves.push_back({{"player", std::string(1, to_char(m.player))}, {"row", m.cell.row}, {"col", m.cell.col}});
  j["moves"] = std::move(moves);
  if (rec.result) {
    j["result"] = {{"outcome", rec.result->winner ? std::string(1, to_char(*rec.result->winner)) : "draw"},
                   {"adjudicated", rec.result->adjudicated}};
  } else {
    j["result"] = nullptr;
  }
  return j;
}

namespace detail {

inline Player parse_player(const std::string& s)
{
  if (s == "X") return Player::X;
  if (s == "O") return Player::O;
  throw error(errc::parse_error, "unknown player '" + s + "'");
}

} // namespace detail

template <class Json>
GameRecord record_from_json(const Json& j)
{
  try {
    GameRecord rec;
    rec.id = j.at("id").template get<std::string>();
    rec.n = j.at("n").template get<int>();
    if (rec.n < 1 || rec.n > Board::max_size) throw error(errc::parse_error, "board size out of range");
    rec.variant = parse_variant(j.at("variant").template get<std::string>());
    rec.player_x = j.at("players").at("X").template get<std::string>();
    rec.player_o = j.at("players").at("O").template get<std::string>();
    for (const auto& m : j.at("moves"))
      rec.moves.push_back({detail::parse_player(m.at("player").template get<std::string>()),
                           {m.at("row").template get<int>(), m.at("col").template get<int>()}});
    const auto& res = j.at("result");
    if (!res.is_null()) {
      const std::string outcome = res.at("outcome").template get<std::string>();
      GameResult r;
      if (outcome != "draw") r.winner = detail::parse_player(outcome);
      r.adjudicated = res.at("adjudicated").template get<bool>();
      rec.result = r;
    }
    return rec;
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::parse_error, std::string("malformed game record: ") + e.what());
  }
}

/// Two-space indented JSON with a trailing newline.
inline std::string serialize(const GameRecord& rec) { return to_json(rec).dump(2) + "\n"; }

inline GameRecord parse_record(std::string_view text)
{
  nlohmann::ordered_json j;
  try {
    j = nlohmann::ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw error(errc::parse_error, std::string("game record is not JSON: ") + e.what());
  }
  return record_from_json(j);
}

} // namespace transversal
