#include "btom/service.hpp"

#include <chrono>

#include "httplib.h"

namespace btom {

using nlohmann::json;

std::string instruction_text(Condition c, Color goal) {
  switch (c) {
    case Condition::NU: return "Reach the shown exit.";
    case Condition::DU:
      return "Find the " + std::string(color_name(goal)) + " (" + std::string(1, to_char(goal)) + ") exit.";
    case Condition::PU: return "Find your way to the shown exit.";
  }
  return "";
}

namespace {

constexpr std::array<ModelKind, 4> kSessionModels{ModelKind::FullBToM, ModelKind::TWG, ModelKind::TW, ModelKind::TG};

json cell_json(Cell c) { return {{"x", c.x}, {"y", c.y}}; }

json model_json(std::string_view name, const JointPosterior& post, const Maze& maze) {
  const Marginals m = marginals(post);
  const int truth = true_goal_belief(maze);
  return {{"model", name},
          {"goal", {{"R", m.goal[0]}, {"B", m.goal[1]}, {"Y", m.goal[2]}, {"O", m.goal[3]}}},
          {"goal_belief_true", m.goal_belief[static_cast<std::size_t>(truth)]},
          {"goal_belief_entropy", entropy(m.goal_belief)},
          {"world", {{"true", m.world[0]}, {"freespace", m.world[1]}}},
          {"entropy", averaged_entropy(post)}};
}

}  // namespace

Session::Session(std::string id, const Maze& maze, Condition condition, Color goal, const ServiceConfig& cfg)
    : id_(std::move(id)),
      maze_(&maze),
      condition_(condition),
      goal_(goal),
      pos_(maze.start()),
      seen_(maze),
      switch_s1_(default_pool(cfg.model), cfg.gamma0_s1, Measure::S1, maze, goal),
      switch_s2_(default_pool(cfg.model), cfg.gamma0_s2, Measure::S2, maze, goal) {
  seen_.reveal_from(maze, pos_, condition_radius(condition, maze));
  for (ModelKind k : kSessionModels) models_.emplace_back(ModelSpec{k, cfg.model}, maze, goal);
}

Session::MoveResult Session::submit(Action a) {
  std::lock_guard lock(mu_);
  if (reached_ || closed_) return {};
  const Cell goal_cell = maze_->exits()[static_cast<std::size_t>(maze_->slot_of_color(goal_))].cell;
  if (a == Action::Enter) {
    if (pos_ != goal_cell) return {};
    reached_ = true;
    cv_.notify_all();
    return {true, true};
  }
  if (!maze_->passable(step(pos_, a))) return {};

  std::array<double, 5> s1{}, s2{};
  for (std::size_t i = 0; i < models_.size(); ++i) {
    const auto p = models_[i].predict();
    s1[i] = surprise(Measure::S1, p, a);
    s2[i] = surprise(Measure::S2, p, a);
    models_[i].advance(a);
  }
  const std::size_t before = switch_s1_.reevaluations().size();
  s1[4] = switch_s1_.step(a);
  s2[4] = switch_s2_.step(a);
  for (std::size_t i = 0; i < 4; ++i) {
    acc_s1_[i] += s1[i];
    acc_s2_[i] += s2[i];
  }
  acc_s1_[4] = switch_s1_.accumulated();
  acc_s2_[4] = switch_s2_.accumulated();
  std::optional<SwitchEvent> event;
  if (switch_s1_.reevaluations().size() > before) event = switch_s1_.reevaluations().back();

  pos_ = step(pos_, a);
  seen_.reveal_from(*maze_, pos_, condition_radius(condition_, *maze_));
  ++steps_;
  frames_.push_back(frame_locked(a, s1, s2, event));
  cv_.notify_all();
  return {true, false};
}

json Session::frame_locked(Action a, const std::array<double, 5>& s1, const std::array<double, 5>& s2,
                           const std::optional<SwitchEvent>& event) const {
  json models = json::array();
  for (std::size_t i = 0; i < models_.size(); ++i) {
    json m = model_json(model_name(models_[i].spec().kind), models_[i].posterior(), *maze_);
    m["surprise"] = {{"S1", {{"step", s1[i]}, {"accumulated", acc_s1_[i]}}},
                     {"S2", {{"step", s2[i]}, {"accumulated", acc_s2_[i]}}}};
    models.push_back(std::move(m));
  }
  json sw = model_json("Switching", switch_s1_.active_model().posterior(), *maze_);
  sw["active"] = model_name(switch_s1_.active_kind());
  sw["gamma"] = switch_s1_.gamma();
  sw["surprise"] = {{"S1", {{"step", s1[4]}, {"accumulated", acc_s1_[4]}}},
                    {"S2", {{"step", s2[4]}, {"accumulated", acc_s2_[4]}}}};
  sw["active_S2"] = model_name(switch_s2_.active_kind());
  models.push_back(std::move(sw));
  json f = {{"step", steps_}, {"action", std::string(1, to_char(a))}, {"agent", cell_json(pos_)}, {"models", models}};
  if (event)
    f["switch"] = {{"step", event->step},
                   {"from", model_name(event->from)},
                   {"to", model_name(event->to)},
                   {"gamma_before", event->gamma_before}};
  else
    f["switch"] = nullptr;
  return f;
}

json Session::view() const {
  std::lock_guard lock(mu_);
  return view_locked();
}

json Session::view_locked() const {
  const Maze& m = *maze_;
  json rows = json::array();
  for (int y = 0; y < m.height(); ++y) {
    std::string row;
    for (int x = 0; x < m.width(); ++x) {
      const Cell c{x, y};
      const bool shown = condition_ != Condition::PU || seen_.revealed(m, c);
      row += !shown ? '?' : (m.is_wall(c) ? '#' : '.');
    }
    rows.push_back(row);
  }
  json exits = json::array();
  for (std::size_t s = 0; s < 4; ++s) {
    const Exit& e = m.exits()[s];
    if (condition_ == Condition::DU) {
      const auto& id = seen_.exit_identities()[s];
      exits.push_back({{"x", e.cell.x}, {"y", e.cell.y}, {"color", id ? std::string(1, to_char(*id)) : "generic"}});
    } else if (e.color == goal_) {
      exits.push_back({{"x", e.cell.x}, {"y", e.cell.y}, {"color", std::string(1, to_char(e.color))}});
    }
  }
  return {{"session", id_},
          {"maze", m.id()},
          {"variant", m.variant()},
          {"condition", condition_name(condition_)},
          {"instruction", instruction_text(condition_, goal_)},
          {"width", m.width()},
          {"height", m.height()},
          {"cells", rows},
          {"exits", exits},
          {"agent", cell_json(pos_)},
          {"steps", steps_},
          {"reached", reached_}};
}

std::vector<json> Session::frames_since(std::size_t from, int wait_ms) const {
  std::unique_lock lock(mu_);
  cv_.wait_for(lock, std::chrono::milliseconds(wait_ms), [&] { return frames_.size() > from || reached_ || closed_; });
  if (from >= frames_.size()) return {};
  return {frames_.begin() + static_cast<std::ptrdiff_t>(from), frames_.end()};
}

std::size_t Session::frame_count() const {
  std::lock_guard lock(mu_);
  return frames_.size();
}

bool Session::finished() const {
  std::lock_guard lock(mu_);
  return reached_ || closed_;
}

void Session::close() {
  std::lock_guard lock(mu_);
  closed_ = true;
  cv_.notify_all();
}

// ---------------------------------------------------------------------------

Service::Service(std::vector<Maze> mazes, ServiceConfig cfg) : mazes_(std::move(mazes)), cfg_(cfg) {
  cfg_.model.validate();
}

Service::~Service() { stop(); }

json Service::list_mazes() const {
  json out = json::array();
  for (const auto& m : mazes_) {
    const auto goal = m.goal();
    for (Condition c : kAllConditions)
      out.push_back({{"maze", m.id()},
                     {"variant", m.variant()},
                     {"condition", condition_name(c)},
                     {"goal", goal ? std::string(1, to_char(*goal)) : ""}});
  }
  return out;
}

json Service::create_session(const json& body) {
  try {
    const std::string id = body.at("maze").get<std::string>();
    const int variant = body.value("variant", 1);
    const auto cond = condition_from_name(body.at("condition").get<std::string>());
    if (!cond) throw Error(ErrorCode::BadRecord, "unknown condition");
    const Maze* maze = nullptr;
    for (const auto& m : mazes_)
      if (m.id() == id && m.variant() == variant) maze = &m;
    if (!maze) throw Error(ErrorCode::UnknownMaze, "no maze " + id + " variant " + std::to_string(variant));
    std::optional<Color> goal = maze->goal();
    if (body.contains("goal")) {
      const auto g = body.at("goal").get<std::string>();
      goal = g.size() == 1 ? color_from_char(g[0]) : std::nullopt;
    }
    if (!goal) throw Error(ErrorCode::BadRecord, "no goal color");
    std::shared_ptr<Session> s;
    {
      std::lock_guard lock(mu_);
      const std::string sid = "s" + std::to_string(next_id_++);
      s = std::make_shared<Session>(sid, *maze, *cond, *goal, cfg_);
      sessions_[sid] = s;
    }
    return {{"session", s->id()}, {"view", s->view()}};
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadRecord, e.what());
  }
}

std::shared_ptr<Session> Service::session(const std::string& id) const {
  std::lock_guard lock(mu_);
  auto it = sessions_.find(id);
  if (it == sessions_.end()) throw Error(ErrorCode::UnknownSession, "no session '" + id + "'");
  return it->second;
}

json Service::submit(const std::string& id, const json& body) {
  auto s = session(id);
  std::optional<Action> a;
  try {
    const auto text = body.at("action").get<std::string>();
    if (text.size() == 1) a = action_from_char(text[0]);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::BadRecord, e.what());
  }
  if (!a) throw Error(ErrorCode::BadRecord, "action must be one of U, D, L, R, E");
  const auto r = s->submit(*a);
  return {{"accepted", r.accepted}, {"rejected", !r.accepted}, {"reached", r.reached}, {"view", s->view()}};
}

json Service::view(const std::string& id) const { return session(id)->view(); }

namespace {

int http_status(ErrorCode c) {
  switch (c) {
    case ErrorCode::UnknownMaze:
    case ErrorCode::UnknownSession:
    case ErrorCode::UnknownTrajectory: return 404;
    default: return 400;
  }
}

}  // namespace

void Service::install_routes() {
  auto& srv = *server_;
  auto guard = [](httplib::Response& res, auto&& fn) {
    try {
      res.set_content(fn().dump(), "application/json");
    } catch (const Error& e) {
      res.status = http_status(e.code());
      res.set_content(json{{"error", std::string(to_string(e.code()))}, {"message", e.what()}}.dump(),
                      "application/json");
    }
  };
  auto parse_body = [](const httplib::Request& req) {
    try {
      return req.body.empty() ? json::object() : json::parse(req.body);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::BadRecord, e.what());
    }
  };

  srv.Get("/api/mazes", [=, this](const httplib::Request&, httplib::Response& res) {
    guard(res, [&] { return list_mazes(); });
  });
  srv.Post("/api/sessions", [=, this](const httplib::Request& req, httplib::Response& res) {
    guard(res, [&] { return create_session(parse_body(req)); });
  });
  srv.Get(R"(/api/sessions/([^/]+))", [=, this](const httplib::Request& req, httplib::Response& res) {
    guard(res, [&] { return view(req.matches[1]); });
  });
  srv.Post(R"(/api/sessions/([^/]+)/actions)", [=, this](const httplib::Request& req, httplib::Response& res) {
    guard(res, [&] { return submit(req.matches[1], parse_body(req)); });
  });
  srv.Get(R"(/api/sessions/([^/]+)/frames)", [=, this](const httplib::Request& req, httplib::Response& res) {
    std::shared_ptr<Session> s;
    try {
      s = session(req.matches[1]);
    } catch (const Error& e) {
      guard(res, [&]() -> json { throw e; });
      return;
    }
    std::size_t from = 0;
    if (req.has_param("since")) from = std::stoul(req.get_param_value("since"));
    auto next = std::make_shared<std::size_t>(from);
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [this, s, next](std::size_t, httplib::DataSink& sink) {
      if (stopping_) {
        sink.done();
        return true;
      }
      for (const auto& f : s->frames_since(*next, 200)) {
        const std::string chunk = "id: " + std::to_string(*next) + "\ndata: " + f.dump() + "\n\n";
        if (!sink.write(chunk.data(), chunk.size())) return false;
        ++*next;
      }
      if (s->finished() && *next >= s->frame_count()) {
        const std::string end = "event: end\ndata: {}\n\n";
        sink.write(end.data(), end.size());
        sink.done();
      }
      return true;
    });
  });
}

int Service::bind(const std::string& host, int port) {
  server_ = std::make_unique<httplib::Server>();
  // SO_REUSEADDR only: the library default also sets SO_REUSEPORT, which
  // would let a second service share a port that is already taken.
  server_->set_socket_options([](auto sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const void*>(&yes), sizeof(yes));
  });
  install_routes();
  int bound = -1;
  if (port == 0) {
    bound = server_->bind_to_any_port(host);
  } else if (server_->bind_to_port(host, port)) {
    bound = port;
  }
  if (bound <= 0) throw Error(ErrorCode::PortInUse, "cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void Service::run() {
  if (!server_) throw Error(ErrorCode::InvalidConfig, "bind() before run()");
  server_->listen_after_bind();
}

void Service::stop() {
  stopping_ = true;
  {
    std::lock_guard lock(mu_);
    for (auto& [id, s] : sessions_) s->close();
  }
  if (server_) server_->stop();
}

}  // namespace btom
