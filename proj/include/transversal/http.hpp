#pragma once

#include <functional>
#include <string>

#include "httplib.h"
#include "json.hpp"

#include "transversal/service.hpp"

namespace transversal {

inline int http_status(errc code)
{
  switch (code) {
  case errc::invalid_argument:
  case errc::out_of_bounds:
  case errc::dimension_mismatch:
  case errc::parse_error: return 400;
  case errc::not_found: return 404;
  case errc::occupied_cell:
  case errc::wrong_turn:
  case errc::game_over:
  case errc::conflict: return 409;
  case errc::node_limit_exceeded:
  case errc::tractability_bound: return 422;
  default: return 500;
  }
}

namespace detail {

inline void send_json(httplib::Response& res, int status, const nlohmann::ordered_json& body)
{
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

inline void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message)
{
  send_json(res, status, {{"error", {{"code", code}, {"message", message}}}});
}

/// Runs a handler and maps every failure onto a structured error response.
inline void guarded(httplib::Response& res, const std::function<void()>& body)
{
  try {
    body();
  } catch (const error& e) {
    send_error(res, http_status(e.code()), to_string(e.code()), e.message());
  } catch (const nlohmann::json::exception& e) {
    send_error(res, 400, to_string(errc::parse_error), e.what());
  } catch (const std::exception& e) {
    send_error(res, 500, "Internal", e.what());
  }
}

inline nlohmann::ordered_json body_of(const httplib::Request& req)
{
  if (req.body.empty()) return nlohmann::ordered_json::object();
  auto j = nlohmann::ordered_json::parse(req.body);
  if (!j.is_object()) throw error(errc::parse_error, "request body must be a JSON object");
  return j;
}

} // namespace detail

/// Mounts the game routes on `server`. The service must outlive it.
inline void mount(httplib::Server& server, GameService& svc)
{
  using detail::guarded;
  using detail::send_json;
  const char* game = R"(/games/([A-Za-z0-9_-]+))";

  server.set_default_headers({{"Access-Control-Allow-Origin", "*"},
                              {"Access-Control-Allow-Methods", "GET, POST, DELETE, OPTIONS"},
                              {"Access-Control-Allow-Headers", "Content-Type"}});
  server.Options(R"(.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });

  server.Post("/games", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 201, svc.create_game(detail::body_of(req))); });
  });
  server.Get("/games", [&svc](const httplib::Request&, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, svc.list_games()); });
  });
  server.Get(game, [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, svc.get_game(req.matches[1])); });
  });
  server.Delete(game, [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] {
      svc.delete_game(req.matches[1]);
      res.status = 204;
    });
  });
  server.Post(std::string(game) + "/moves", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, svc.submit_move(req.matches[1], detail::body_of(req))); });
  });
  server.Get(std::string(game) + "/analysis", [&svc](const httplib::Request& req, httplib::Response& res) {
    guarded(res, [&] { send_json(res, 200, svc.analysis(req.matches[1])); });
  });
}

} // namespace transversal
