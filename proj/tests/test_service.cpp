#include <gtest/gtest.h>

#include <atomic>
#include <filesystem>
#include <random>
#include <thread>

#include "transversal/http.hpp"
#include "transversal/service.hpp"

using namespace transversal;
using json = nlohmann::ordered_json;

namespace {

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

std::filesystem::path fresh_dir(const std::string& name)
{
  const auto dir = std::filesystem::temp_directory_path() / ("transversal-" + name + "-" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  return dir;
}

Cell cell_of(const json& j) { return {j.at("row").get<int>(), j.at("col").get<int>()}; }

/// Plays random human moves until the game ends.
json play_out(GameService& svc, const std::string& id, std::mt19937_64& rng)
{
  json state = svc.get_game(id);
  while (state["status"]["state"] == "in_progress") {
    const Board b = replay(svc.record(id));
    const auto empties = b.empty_cells();
    const Cell c = empties[rng() % empties.size()];
    state = svc.submit_move(id, {{"row", c.row}, {"col", c.col}});
  }
  return state;
}

} // namespace

TEST(Service, EngineOpensWhenPlayingFirst)
{
  GameService svc;
  const json g = svc.create_game({{"n", 4}, {"variant", "strong"}, {"engine", "theorem1"}, {"engine_plays", "first"}});
  ASSERT_EQ(g["moves"].size(), 1u);
  EXPECT_EQ(cell_of(g["moves"][0]), (Cell{1, 1}));
  EXPECT_EQ(g["board"][0], "X...");
  EXPECT_EQ(g["status"]["to_move"], "O");
  EXPECT_EQ(g["players"]["X"], "theorem1");
  EXPECT_EQ(g["players"]["O"], "human");
}

TEST(Service, HumanFirstAgainstDrawStrategy)
{
  GameService svc;
  const json g = svc.create_game({{"n", 3}, {"engine", "prop2-o-draw"}, {"engine_plays", "second"}});
  EXPECT_TRUE(g["moves"].empty());
  const json after = svc.submit_move(g["id"], {{"row", 2}, {"col", 2}});
  EXPECT_EQ(after["moves"].size(), 2u);
}

TEST(Service, RejectsIllegalMovesWithoutChangingState)
{
  GameService svc;
  const json g = svc.create_game({{"n", 4}, {"engine", "theorem1"}});
  const std::string id = g["id"];
  const json before = svc.get_game(id);
  EXPECT_EQ(code_of([&] { svc.submit_move(id, {{"row", 1}, {"col", 1}}); }), errc::occupied_cell);
  EXPECT_EQ(code_of([&] { svc.submit_move(id, {{"row", 9}, {"col", 1}}); }), errc::out_of_bounds);
  EXPECT_EQ(code_of([&] { svc.submit_move(id, {{"row", 1}}); }), errc::invalid_argument);
  EXPECT_EQ(code_of([&] { svc.submit_move(id, {{"row", "a"}, {"col", 1}}); }), errc::invalid_argument);
  EXPECT_EQ(code_of([&] { svc.submit_move(id, {{"row", 2}, {"col", 2}, {"ply", 0}}); }), errc::conflict);
  EXPECT_EQ(svc.get_game(id), before);
  EXPECT_EQ(code_of([&] { svc.get_game("g999999"); }), errc::not_found);
  EXPECT_EQ(code_of([&] { svc.create_game({{"n", 0}}); }), errc::invalid_argument);
  EXPECT_EQ(code_of([&] { svc.create_game({{"n", 3}, {"engine", "theorem1"}}); }), errc::invalid_argument);
  EXPECT_EQ(code_of([&] { svc.create_game({{"n", 4}, {"engine", "theorem1"}, {"engine_plays", "second"}}); }),
            errc::invalid_argument);
}

TEST(Service, StateAlwaysEqualsReplay)
{
  GameService svc;
  std::mt19937_64 rng(51);
  for (int i = 0; i < 20; ++i) {
    const json g = svc.create_game({{"n", 5}, {"engine", "theorem1"}});
    const std::string id = g["id"];
    const json end = play_out(svc, id, rng);
    const GameRecord rec = svc.record(id);
    EXPECT_NO_THROW(verify_record(rec));
    EXPECT_EQ(end["status"]["state"], "won");
    EXPECT_EQ(end["status"]["winner"], "X");
    const Board b = replay(rec);
    for (int r = 0; r < 5; ++r) {
      const std::string text = to_text(b);
      EXPECT_EQ(end["board"][r], text.substr(std::size_t(r) * 6, 5));
    }
    EXPECT_EQ(code_of([&] { svc.submit_move(id, {{"row", 1}, {"col", 1}}); }), errc::game_over);
  }
}

TEST(Service, AnalysisMatchesCore)
{
  GameService svc;
  std::mt19937_64 rng(52);
  for (int n : {3, 4, 5}) {
    const json g = svc.create_game({{"n", n}});
    const std::string id = g["id"];
    for (int ply = 0; ply < n * n / 2; ++ply) {
      const Board b = replay(svc.record(id));
      if (game_status(b, Variant::Strong).is_over()) break;
      const json a = svc.analysis(id);
      EXPECT_EQ(a["threats_x"], GameService::cells_json(threats(b, Player::X)));
      EXPECT_EQ(a["threats_o"], GameService::cells_json(threats(b, Player::O)));
      EXPECT_EQ(a["matching_x"], max_transversal_matching(b, Player::X));
      EXPECT_EQ(a["matching_o"], max_transversal_matching(b, Player::O));
      EXPECT_EQ(a["can_win_x"], can_ever_win(b, Player::X));
      EXPECT_EQ(a["can_win_o"], can_ever_win(b, Player::O));
      if (n <= 4) {
        ASSERT_TRUE(a.contains("value"));
        EXPECT_EQ(a["value"], to_string(solve(b, b.to_move(), Variant::Strong).value));
      } else {
        EXPECT_FALSE(a.contains("value"));
      }
      const auto empties = b.empty_cells();
      const Cell c = empties[rng() % empties.size()];
      svc.submit_move(id, {{"row", c.row}, {"col", c.col}});
    }
  }
}

TEST(Service, AnalysisOmitsValueOverBudget)
{
  ServiceOptions opts;
  opts.analysis_node_limit = 5;
  GameService svc(opts);
  const json g = svc.create_game({{"n", 4}});
  const json a = svc.analysis(g["id"]);
  EXPECT_FALSE(a.contains("value"));
  EXPECT_TRUE(a.contains("matching_x"));
}

TEST(Service, ConcurrentMovesResolveToOne)
{
  GameService svc;
  for (int round = 0; round < 20; ++round) {
    const json g = svc.create_game({{"n", 6}});
    const std::string id = g["id"];
    std::atomic<int> ok{0}, conflicts{0};
    std::vector<std::thread> threads;
    for (int t = 0; t < 6; ++t)
      threads.emplace_back([&, t] {
        try {
          svc.submit_move(id, {{"row", t + 1}, {"col", t + 1}, {"ply", 0}});
          ++ok;
        } catch (const error& e) {
          if (e.code() == errc::conflict) ++conflicts;
        }
      });
    for (auto& th : threads) th.join();
    EXPECT_EQ(ok.load(), 1);
    EXPECT_EQ(conflicts.load(), 5);
    EXPECT_EQ(svc.record(id).moves.size(), 1u);
  }
}

TEST(Service, PersistsAndResumes)
{
  const auto dir = fresh_dir("persist");
  ServiceOptions opts;
  opts.persistence_dir = dir;
  std::string id;
  std::vector<Cell> human;
  {
    GameService svc(opts);
    id = svc.create_game({{"n", 6}, {"engine", "theorem1"}})["id"];
    svc.submit_move(id, {{"row", 2}, {"col", 2}});
    svc.submit_move(id, {{"row", 6}, {"col", 6}});
    EXPECT_TRUE(std::filesystem::exists(dir / (id + ".json")));
  }
  GameService reference;
  const std::string rid = reference.create_game({{"n", 6}, {"engine", "theorem1"}})["id"];
  reference.submit_move(rid, {{"row", 2}, {"col", 2}});
  reference.submit_move(rid, {{"row", 6}, {"col", 6}});

  GameService resumed(opts);
  EXPECT_EQ(resumed.record(id).moves, reference.record(rid).moves);
  // The rebuilt engine keeps following the same strategy.
  std::mt19937_64 rng(53);
  for (;;) {
    const Board b = replay(resumed.record(id));
    if (game_status(b, Variant::Strong).is_over()) break;
    const auto empties = b.empty_cells();
    const Cell c = empties[rng() % empties.size()];
    const json a = resumed.submit_move(id, {{"row", c.row}, {"col", c.col}});
    const json r = reference.submit_move(rid, {{"row", c.row}, {"col", c.col}});
    ASSERT_EQ(a["moves"], r["moves"]);
  }
  const std::string next = resumed.create_game({{"n", 3}})["id"];
  EXPECT_GT(next, id);

  resumed.delete_game(id);
  EXPECT_FALSE(std::filesystem::exists(dir / (id + ".json")));
  EXPECT_EQ(code_of([&] { resumed.get_game(id); }), errc::not_found);
  std::filesystem::remove_all(dir);
}

TEST(Service, ListsGames)
{
  GameService svc;
  svc.create_game({{"n", 3}});
  svc.create_game({{"n", 4}, {"engine", "theorem1"}});
  const json list = svc.list_games();
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[1]["players"]["X"], "theorem1");
  EXPECT_EQ(list[1]["moves"], 1);
}

TEST(Http, Endpoints)
{
  GameService svc;
  httplib::Server server;
  mount(server, svc);
  const int port = server.bind_to_any_port("127.0.0.1");
  ASSERT_GT(port, 0);
  std::thread th([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client cli("127.0.0.1", port);
  auto created = cli.Post("/games", R"({"n":4,"variant":"strong","engine":"theorem1","engine_plays":"first"})",
                          "application/json");
  ASSERT_TRUE(created);
  EXPECT_EQ(created->status, 201);
  EXPECT_EQ(created->get_header_value("Access-Control-Allow-Origin"), "*");
  const json g = json::parse(created->body);
  const std::string id = g["id"];
  EXPECT_EQ(g["board"][0], "X...");

  auto occupied = cli.Post("/games/" + id + "/moves", R"({"row":1,"col":1})", "application/json");
  ASSERT_TRUE(occupied);
  EXPECT_EQ(occupied->status, 409);
  EXPECT_EQ(json::parse(occupied->body)["error"]["code"], "OccupiedCell");

  auto moved = cli.Post("/games/" + id + "/moves", R"({"row":2,"col":2})", "application/json");
  ASSERT_TRUE(moved);
  EXPECT_EQ(moved->status, 200);
  EXPECT_EQ(json::parse(moved->body)["moves"].size(), 3u);

  auto state = cli.Get("/games/" + id);
  ASSERT_TRUE(state);
  EXPECT_EQ(json::parse(state->body), svc.get_game(id));

  auto analysis = cli.Get("/games/" + id + "/analysis");
  ASSERT_TRUE(analysis);
  EXPECT_EQ(analysis->status, 200);
  EXPECT_EQ(json::parse(analysis->body)["value"], "FirstPlayerWin");

  auto bad = cli.Post("/games", "{not json", "application/json");
  ASSERT_TRUE(bad);
  EXPECT_EQ(bad->status, 400);
  EXPECT_TRUE(json::parse(bad->body)["error"].contains("message"));

  auto arr = cli.Post("/games", "[1,2]", "application/json");
  ASSERT_TRUE(arr);
  EXPECT_EQ(arr->status, 400);

  auto missing = cli.Get("/games/g424242");
  ASSERT_TRUE(missing);
  EXPECT_EQ(missing->status, 404);
  EXPECT_EQ(json::parse(missing->body)["error"]["code"], "NotFound");

  auto list = cli.Get("/games");
  ASSERT_TRUE(list);
  EXPECT_EQ(json::parse(list->body).size(), 1u);

  auto pre = cli.Options("/games");
  ASSERT_TRUE(pre);
  EXPECT_EQ(pre->status, 204);

  auto del = cli.Delete("/games/" + id);
  ASSERT_TRUE(del);
  EXPECT_EQ(del->status, 204);
  auto gone = cli.Get("/games/" + id);
  ASSERT_TRUE(gone);
  EXPECT_EQ(gone->status, 404);

  server.stop();
  th.join();
}
