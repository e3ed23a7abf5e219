#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <semaphore>
#include <sstream>
#include <string>

#include "json.hpp"

#include "transversal/record.hpp"
#include "transversal/solver.hpp"
#include "transversal/strategy.hpp"

namespace transversal {

struct ServiceOptions {
  std::optional<std::filesystem::path> persistence_dir;
  /// Node budget for the analysis endpoint's solver call.
  std::uint64_t analysis_node_limit = 2'000'000;
  /// Analysis values are only attempted up to this n.
  int analysis_max_n = 4;
};

/// Live game: the record plus its board and the engine's private state.
struct GameSession {
  GameRecord record;
  Board board{1};
  std::optional<Engine> engine;
  std::mutex mutex;
};

/// Turn-based game service. Transport-agnostic: every call takes and returns
/// JSON and reports failures as `error`; see http.hpp for the HTTP binding.
class GameService {
public:
  using json = nlohmann::ordered_json;

  explicit GameService(ServiceOptions opts = {}) : opts_(std::move(opts))
  {
    if (opts_.persistence_dir) load_all();
  }

  json create_game(const json& req)
  {
    const int n = field<int>(req, "n");
    if (n < 1 || n > Board::max_size) throw error(errc::invalid_argument, "n out of range");
    const Variant variant = parse_variant(req.contains("variant") ? field<std::string>(req, "variant") : "strong");

    auto session = std::make_shared<GameSession>();
    session->record.n = n;
    session->record.variant = variant;
    session->board = Board(n);
    if (req.contains("engine") && !req.at("engine").is_null()) {
      const StrategyId id = parse_strategy_id(field<std::string>(req, "engine"));
      const std::string plays = req.contains("engine_plays") ? field<std::string>(req, "engine_plays") : "first";
      Player side;
      if (plays == "first" || plays == "X") side = Player::X;
      else if (plays == "second" || plays == "O") side = Player::O;
      else throw error(errc::invalid_argument, "engine_plays must be first or second");
      session->engine.emplace(id, n, variant, side);
      (side == Player::X ? session->record.player_x : session->record.player_o) = to_string(id);
    }

    {
      std::lock_guard lk(registry_mutex_);
      session->record.id = next_id();
      games_[session->record.id] = session;
    }
    std::lock_guard lk(session->mutex);
    advance_engine(*session);
    persist(*session);
    return state_json(*session);
  }

  json get_game(const std::string& id)
  {
    auto s = find(id);
    std::lock_guard lk(s->mutex);
    return state_json(*s);
  }

  /// Human move, followed synchronously by the engine's reply. Concurrent
  /// submissions to one game do not queue: the loser gets a conflict.
  json submit_move(const std::string& id, const json& req)
  {
    auto s = find(id);
    std::unique_lock lk(s->mutex, std::try_to_lock);
    if (!lk.owns_lock()) throw error(errc::conflict, "another move for this game is in progress");
    if (req.contains("ply") && field<std::size_t>(req, "ply") != s->record.moves.size())
      throw error(errc::conflict, "stale ply: game has " + std::to_string(s->record.moves.size()) + " moves");
    const Cell cell{field<int>(req, "row"), field<int>(req, "col")};
    const Player mover = s->board.to_move();
    if (game_status(s->board, s->record.variant).is_over()) throw error(errc::game_over, "game is already decided");
    if (s->engine && s->engine->side() == mover) throw error(errc::wrong_turn, "it is the engine's turn");
    s->board = apply_move(s->board, mover, cell, s->record.variant);
    s->record.moves.push_back({mover, cell});
    settle(*s);
    advance_engine(*s);
    persist(*s);
    return state_json(*s);
  }

  json analysis(const std::string& id)
  {
    auto s = find(id);
    Board b(1);
    Variant variant;
    {
      std::lock_guard lk(s->mutex);
      b = s->board;
      variant = s->record.variant;
    }
    json out;
    out["id"] = id;
    out["threats_x"] = cells_json(threats(b, Player::X));
    out["threats_o"] = cells_json(threats(b, Player::O));
    out["matching_x"] = max_transversal_matching(b, Player::X);
    out["matching_o"] = max_transversal_matching(b, Player::O);
    out["can_win_x"] = can_ever_win(b, Player::X);
    out["can_win_o"] = can_ever_win(b, Player::O);
    const GameStatus st = game_status(b, variant);
    if (!st.is_over() && b.size() <= opts_.analysis_max_n) {
      solver_slots_.acquire();
      try {
        Solver solver(SolveOptions{.node_limit = opts_.analysis_node_limit, .memo_capacity = std::size_t(1) << 18});
        const SolveResult r = solver.solve(b, st.player, variant);
        out["value"] = std::string(to_string(r.value));
        if (r.best_move) out["best_move"] = cell_json(*r.best_move);
      } catch (const node_limit_exceeded&) {
        // Over budget: the value is simply omitted.
      }
      solver_slots_.release();
    }
    return out;
  }

  json list_games()
  {
    json out = json::array();
    std::lock_guard lk(registry_mutex_);
    for (const auto& [id, s] : games_) {
      std::lock_guard slk(s->mutex);
      out.push_back({{"id", id},
                     {"n", s->record.n},
                     {"variant", std::string(to_string(s->record.variant))},
                     {"players", {{"X", s->record.player_x}, {"O", s->record.player_o}}},
                     {"moves", s->record.moves.size()},
                     {"status", status_json(game_status(s->board, s->record.variant))}});
    }
    return out;
  }

  void delete_game(const std::string& id)
  {
    std::shared_ptr<GameSession> s;
    {
      std::lock_guard lk(registry_mutex_);
      auto it = games_.find(id);
      if (it == games_.end()) throw error(errc::not_found, "no game '" + id + "'");
      s = it->second;
      games_.erase(it);
    }
    if (opts_.persistence_dir) std::filesystem::remove(file_for(id));
  }

  GameRecord record(const std::string& id)
  {
    auto s = find(id);
    std::lock_guard lk(s->mutex);
    return s->record;
  }

  static json cell_json(Cell c) { return {{"row", c.row}, {"col", c.col}}; }

  static json cells_json(const std::vector<Cell>& cells)
  {
    json out = json::array();
    for (Cell c : cells) out.push_back(cell_json(c));
    return out;
  }

  static json status_json(const GameStatus& st)
  {
    switch (st.kind) {
    case GameStatus::Kind::InProgress: return {{"state", "in_progress"}, {"to_move", std::string(1, to_char(st.player))}};
    case GameStatus::Kind::Won:
      return {{"state", "won"}, {"winner", std::string(1, to_char(st.player))}, {"adjudicated", st.adjudicated}};
    case GameStatus::Kind::Draw: return {{"state", "draw"}};
    }
    return {};
  }

private:
  template <class T>
  static T field(const json& j, const char* name)
  {
    if (!j.is_object() || !j.contains(name)) throw error(errc::invalid_argument, std::string("missing field '") + name + "'");
    try {
      return j.at(name).get<T>();
    } catch (const nlohmann::json::exception&) {
      throw error(errc::invalid_argument, std::string("field '") + name + "' has the wrong type");
    }
  }

  std::shared_ptr<GameSession> find(const std::string& id)
  {
    std::lock_guard lk(registry_mutex_);
    auto it = games_.find(id);
    if (it == games_.end()) throw error(errc::not_found, "no game '" + id + "'");
    return it->second;
  }

  std::string next_id()
  {
    char buf[16];
    std::snprintf(buf, sizeof buf, "g%06llu", static_cast<unsigned long long>(++counter_));
    return buf;
  }

  static void settle(GameSession& s) { s.record.result = result_of(game_status(s.board, s.record.variant)); }

  void advance_engine(GameSession& s)
  {
    if (!s.engine) return;
    const GameStatus st = game_status(s.board, s.record.variant);
    if (st.is_over() || st.player != s.engine->side()) return;
    std::optional<Cell> last;
    if (!s.record.moves.empty()) last = s.record.moves.back().cell;
    const Cell move = s.engine->next(s.board, last);
    s.board = apply_move(s.board, s.engine->side(), move, s.record.variant);
    s.record.moves.push_back({s.engine->side(), move});
    settle(s);
  }

  json state_json(const GameSession& s) const
  {
    json out = to_json(s.record);
    json rows = json::array();
    const std::string text = to_text(s.board);
    for (std::size_t start = 0; start < text.size();) {
      const std::size_t nl = text.find('\n', start);
      rows.push_back(text.substr(start, nl - start));
      start = nl + 1;
    }
    out["board"] = std::move(rows);
    out["status"] = status_json(game_status(s.board, s.record.variant));
    return out;
  }

  std::filesystem::path file_for(const std::string& id) const { return *opts_.persistence_dir / (id + ".json"); }

  void persist(const GameSession& s) const
  {
    if (!opts_.persistence_dir) return;
    std::filesystem::create_directories(*opts_.persistence_dir);
    const auto target = file_for(s.record.id);
    const auto tmp = target.string() + ".tmp";
    {
      std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
      f << serialize(s.record);
      if (!f) throw error(errc::invalid_argument, "cannot write " + tmp);
    }
    std::filesystem::rename(tmp, target);
  }

  /// Rebuilds sessions from disk. Engine state is recovered by replaying the
  /// record through the (deterministic) strategy from the start.
  void load_all()
  {
    const auto& dir = *opts_.persistence_dir;
    if (!std::filesystem::exists(dir)) return;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
      if (entry.path().extension() != ".json") continue;
      std::ifstream f(entry.path(), std::ios::binary);
      std::stringstream buf;
      buf << f.rdbuf();
      GameRecord rec = parse_record(buf.str());
      verify_record(rec);
      auto s = std::make_shared<GameSession>();
      s->board = Board(rec.n);
      for (Player side : {Player::X, Player::O}) {
        const std::string& who = side == Player::X ? rec.player_x : rec.player_o;
        if (who != "human") s->engine.emplace(parse_strategy_id(who), rec.n, rec.variant, side);
      }
      std::optional<Cell> last;
      for (const MoveRecord& m : rec.moves) {
        if (s->engine && s->engine->side() == m.player) {
          const Cell replayed = s->engine->next(s->board, last);
          if (replayed != m.cell)
            throw error(errc::inconsistent_history, "engine replay diverges in game '" + rec.id + "'");
        }
        s->board = apply_move(s->board, m.player, m.cell, rec.variant);
        last = m.cell;
      }
      s->record = std::move(rec);
      const std::string& id = s->record.id;
      if (id.size() > 1 && id[0] == 'g') {
        try {
          counter_ = std::max<std::uint64_t>(counter_, std::stoull(id.substr(1)));
        } catch (const std::exception&) {
        }
      }
      games_[id] = std::move(s);
    }
  }

  ServiceOptions opts_;
  std::mutex registry_mutex_;
  std::map<std::string, std::shared_ptr<GameSession>> games_;
  std::uint64_t counter_ = 0;
  std::counting_semaphore<64> solver_slots_{2};
};

} // namespace transversal
