#include <chrono>
#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"

#include "transversal/harness.hpp"
#include "transversal/http.hpp"
#include "transversal/record.hpp"
#include "transversal/service.hpp"
#include "transversal/solver.hpp"
#include "transversal/strategy.hpp"

namespace {

using namespace transversal;

constexpr int exit_ok = 0;
constexpr int exit_failure = 1;
constexpr int exit_parameter = 2;
constexpr int exit_node_limit = 3;
constexpr int exit_violations = 4;

std::string read_file(const std::string& path)
{
  std::ifstream f(path, std::ios::binary);
  if (!f) throw error(errc::invalid_argument, "cannot open " + path);
  std::stringstream buf;
  buf << f.rdbuf();
  return buf.str();
}

struct SolveArgs {
  int n = 0;
  std::string variant = "strong";
  bool symmetry = false;
  std::uint64_t node_limit = 0;
  int threads = 1;
  std::string position;
  bool json = false;
};

int run_solve(const SolveArgs& a)
{
  const Variant variant = parse_variant(a.variant);
  Board b(a.n);
  if (!a.position.empty()) {
    b = parse_text(read_file(a.position));
    if (b.size() != a.n) throw error(errc::dimension_mismatch, "position size does not match --n");
  }
  SolveOptions opts;
  opts.symmetry = a.symmetry;
  opts.node_limit = a.node_limit;
  opts.threads = a.threads;
  Solver solver(opts);
  const SolveResult r = solver.solve(b, b.to_move(), variant);
  const auto ms = std::chrono::duration<double, std::milli>(r.elapsed).count();
  if (a.json) {
    nlohmann::ordered_json j;
    j["value"] = std::string(to_string(r.value));
    j["best_move"] = r.best_move ? GameService::cell_json(*r.best_move) : nlohmann::ordered_json(nullptr);
    j["nodes"] = r.nodes_visited;
    j["elapsed_ms"] = ms;
    std::cout << j.dump(2) << "\n";
  } else {
    std::cout << to_string(r.value) << "\n";
    std::cout << "best_move " << (r.best_move ? to_string(*r.best_move) : std::string("none")) << "\n";
    std::cout << "nodes " << r.nodes_visited << "\n";
    std::cout << "elapsed_ms " << ms << "\n";
  }
  return exit_ok;
}

struct VerifyArgs {
  std::string strategy;
  int n = 0;
  std::string variant;
  std::string mode = "exhaustive";
  std::uint64_t games = 1000;
  std::uint64_t seed = 1;
  bool json = false;
  bool allow_long = false;
  int max_x_moves = 0;
};

int run_verify(const VerifyArgs& a)
{
  std::string variant_name = a.variant;
  if (variant_name.empty()) variant_name = a.strategy == "maker-breaker" ? "maker-breaker" : "strong";
  const Variant variant = parse_variant(variant_name);
  VerifyOptions opts;
  opts.allow_long = a.allow_long;
  if (a.max_x_moves > 0) opts.max_x_moves = a.max_x_moves;
  VerificationReport report;
  if (a.mode == "exhaustive") report = verify_exhaustive(a.strategy, a.n, variant, opts);
  else if (a.mode == "random") report = verify_random(a.strategy, a.n, variant, a.games, a.seed, opts);
  else throw error(errc::invalid_argument, "--mode must be exhaustive or random");
  if (a.json) std::cout << to_json(report).dump(2) << "\n";
  else std::cout << to_text(report);
  return report.violations.empty() ? exit_ok : exit_violations;
}

struct PlayArgs {
  int n = 4;
  std::string variant;
  std::string engine = "theorem1";
  std::string engine_plays = "first";
};

void print_board(const Board& b)
{
  std::cout << "   ";
  for (int c = 1; c <= b.size(); ++c) std::cout << (c % 10);
  std::cout << "\n";
  const std::string text = to_text(b);
  std::istringstream rows(text);
  std::string line;
  for (int r = 1; std::getline(rows, line); ++r) std::cout << (r < 10 ? " " : "") << r << " " << line << "\n";
}

int run_play(const PlayArgs& a)
{
  std::string variant_name = a.variant;
  if (variant_name.empty()) variant_name = a.engine == "maker-breaker" ? "maker-breaker" : "strong";
  GameService svc;
  const auto created = svc.create_game(
      {{"n", a.n}, {"variant", variant_name}, {"engine", a.engine}, {"engine_plays", a.engine_plays}});
  const std::string id = created.at("id").get<std::string>();
  const Variant variant = parse_variant(variant_name);

  auto show = [&] {
    const GameRecord rec = svc.record(id);
    if (!rec.moves.empty()) {
      const MoveRecord& m = rec.moves.back();
      std::cout << to_char(m.player) << " played " << to_string(m.cell) << "\n";
    }
    const Board b = replay(rec);
    print_board(b);
    return game_status(b, variant);
  };

  std::cout << "enter moves as: row col   (q to quit)\n";
  GameStatus st = show();
  std::string line;
  while (!st.is_over()) {
    std::cout << to_char(st.player) << "> " << std::flush;
    if (!std::getline(std::cin, line)) break;
    if (line == "q" || line == "quit") break;
    std::istringstream in(line);
    int row = 0;
    int col = 0;
    if (!(in >> row >> col)) {
      std::cout << "expected: row col\n";
      continue;
    }
    try {
      svc.submit_move(id, {{"row", row}, {"col", col}});
    } catch (const error& e) {
      std::cout << e.what() << "\n";
      continue;
    }
    st = show();
  }
  std::cout << to_string(st) << "\n";
  return exit_ok;
}

struct ServeArgs {
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string persist_dir;
  std::uint64_t analysis_node_limit = 2'000'000;
};

httplib::Server* active_server = nullptr;

int run_serve(ServeArgs a)
{
  ServiceOptions opts;
  if (!a.persist_dir.empty()) opts.persistence_dir = a.persist_dir;
  opts.analysis_node_limit = a.analysis_node_limit;
  GameService svc(opts);
  httplib::Server server;
  mount(server, svc);
  if (!server.bind_to_port(a.host, a.port)) {
    std::cerr << "error: cannot bind " << a.host << ":" << a.port << "\n";
    return exit_failure;
  }
  active_server = &server;
  std::signal(SIGINT, [](int) {
    if (active_server) active_server->stop();
  });
  std::signal(SIGTERM, [](int) {
    if (active_server) active_server->stop();
  });
  std::cerr << "listening on " << a.host << ":" << a.port << "\n";
  server.listen_after_bind();
  active_server = nullptr;
  return exit_ok;
}

struct ExportArgs {
  int n = 4;
  std::string variant;
  std::string x = "theorem1";
  std::string o = "random(1)";
  std::string id = "export";
  std::string out;
};

/// Plays one engine-vs-engine game and writes its GameRecord.
int run_export(const ExportArgs& a)
{
  std::string variant_name = a.variant;
  if (variant_name.empty()) variant_name = a.x == "maker-breaker" ? "maker-breaker" : "strong";
  const Variant variant = parse_variant(variant_name);
  Engine ex(parse_strategy_id(a.x), a.n, variant, Player::X);
  Engine eo(parse_strategy_id(a.o), a.n, variant, Player::O);
  GameRecord rec;
  rec.id = a.id;
  rec.n = a.n;
  rec.variant = variant;
  rec.player_x = to_string(ex.id());
  rec.player_o = to_string(eo.id());
  Board b(a.n);
  std::optional<Cell> last;
  for (GameStatus st = game_status(b, variant); !st.is_over(); st = game_status(b, variant)) {
    Engine& e = st.player == Player::X ? ex : eo;
    const Cell move = e.next(b, last);
    b = apply_move(b, st.player, move, variant);
    rec.moves.push_back({st.player, move});
    last = move;
  }
  rec.result = result_of(game_status(b, variant));
  const std::string text = serialize(rec);
  if (a.out.empty()) {
    std::cout << text;
  } else {
    std::ofstream f(a.out, std::ios::binary);
    f << text;
    if (!f) throw error(errc::invalid_argument, "cannot write " + a.out);
  }
  return exit_ok;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"Transversal game engine, solver and strategy verifier"};
  app.require_subcommand(1);

  SolveArgs solve;
  auto* solve_cmd = app.add_subcommand("solve", "Solve a position (the empty board by default)");
  solve_cmd->add_option("--n", solve.n, "Board size")->required();
  solve_cmd->add_option("--variant", solve.variant, "strong or maker-breaker");
  solve_cmd->add_flag("--symmetry", solve.symmetry, "Use canonical keys near the root");
  solve_cmd->add_option("--node-limit", solve.node_limit, "Abort after this many nodes (0 = unlimited)");
  solve_cmd->add_option("--threads", solve.threads, "Root-split worker threads");
  solve_cmd->add_option("--position", solve.position, "Text board file to solve instead of the empty board");
  solve_cmd->add_flag("--json", solve.json, "Print JSON");

  VerifyArgs verify;
  auto* verify_cmd = app.add_subcommand("verify", "Verify a strategy against adversaries");
  verify_cmd->add_option("--strategy", verify.strategy, "Strategy id")->required();
  verify_cmd->add_option("--n", verify.n, "Board size")->required();
  verify_cmd->add_option("--variant", verify.variant, "strong or maker-breaker");
  verify_cmd->add_option("--mode", verify.mode, "exhaustive or random");
  verify_cmd->add_option("--games", verify.games, "Games in random mode");
  verify_cmd->add_option("--seed", verify.seed, "Seed in random mode");
  verify_cmd->add_flag("--json", verify.json, "Print JSON");
  verify_cmd->add_flag("--long", verify.allow_long, "Allow slow exhaustive runs");
  verify_cmd->add_option("--max-x-moves", verify.max_x_moves, "Tighter bound on the winner's move count");

  PlayArgs play;
  auto* play_cmd = app.add_subcommand("play", "Play against an engine in the terminal");
  play_cmd->add_option("--n", play.n, "Board size");
  play_cmd->add_option("--variant", play.variant, "strong or maker-breaker");
  play_cmd->add_option("--engine", play.engine, "Engine strategy id");
  play_cmd->add_option("--engine-plays", play.engine_plays, "first or second");

  ServeArgs serve;
  auto* serve_cmd = app.add_subcommand("serve", "Run the HTTP/JSON game service");
  serve_cmd->add_option("--host", serve.host, "Bind address");
  serve_cmd->add_option("--port", serve.port, "Port");
  serve_cmd->add_option("--persist-dir", serve.persist_dir, "Directory for game records")
      ->envname("TRANSVERSAL_PERSIST_DIR");
  serve_cmd->add_option("--analysis-node-limit", serve.analysis_node_limit, "Solver budget for analysis")
      ->envname("TRANSVERSAL_ANALYSIS_NODE_LIMIT");

  ExportArgs exp;
  auto* export_cmd = app.add_subcommand("export", "Play one engine-vs-engine game and write its record");
  export_cmd->add_option("--n", exp.n, "Board size");
  export_cmd->add_option("--variant", exp.variant, "strong or maker-breaker");
  export_cmd->add_option("--x", exp.x, "Strategy for X");
  export_cmd->add_option("--o", exp.o, "Strategy for O");
  export_cmd->add_option("--id", exp.id, "Record id");
  export_cmd->add_option("--out", exp.out, "Output file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_parameter;
  }

  try {
    if (*solve_cmd) return run_solve(solve);
    if (*verify_cmd) return run_verify(verify);
    if (*play_cmd) return run_play(play);
    if (*serve_cmd) return run_serve(serve);
    if (*export_cmd) return run_export(exp);
  } catch (const node_limit_exceeded& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_node_limit;
  } catch (const error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.code()) {
    case errc::invalid_argument:
    case errc::out_of_bounds:
    case errc::dimension_mismatch:
    case errc::parse_error:
    case errc::tractability_bound:
    case errc::inconsistent_position: return exit_parameter;
    case errc::node_limit_exceeded: return exit_node_limit;
    default: return exit_failure;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_failure;
  }
  return exit_failure;
}
