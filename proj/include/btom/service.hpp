#pragma once

// Live session service: a participant walks a maze under one of the three
// conditions while all models infer from the moves. JSON over HTTP, with
// inference frames pushed as server-sent events.

#include <atomic>
#include <condition_variable>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "btom/simagents.hpp"
#include "btom/switching.hpp"
#include "json.hpp"

namespace httplib {
class Server;
}

namespace btom {

struct ServiceConfig {
  ModelConfig model{};
  double gamma0_s1 = 20.0;
  double gamma0_s2 = 1.5;
};

/// Task text shown to the participant.
std::string instruction_text(Condition c, Color goal);

class Session {
 public:
  Session(std::string id, const Maze& maze, Condition condition, Color goal, const ServiceConfig& cfg);

  struct MoveResult {
    bool accepted = false;
    bool reached = false;
  };

  /// Illegal moves and Enter off the goal exit change nothing. Each accepted
  /// movement appends one inference frame.
  MoveResult submit(Action a);

  /// What the participant may see: hidden cells as '?', exits filtered by
  /// condition.
  nlohmann::json view() const;
  /// Frames from index `from` on; blocks up to `wait_ms` for new ones.
  std::vector<nlohmann::json> frames_since(std::size_t from, int wait_ms) const;
  std::size_t frame_count() const;
  bool finished() const;
  void close();

  const std::string& id() const { return id_; }

 private:
  nlohmann::json frame_locked(Action a, const std::array<double, 5>& s1, const std::array<double, 5>& s2,
                              const std::optional<SwitchEvent>& event) const;
  nlohmann::json view_locked() const;

  std::string id_;
  const Maze* maze_;
  Condition condition_;
  Color goal_;
  Cell pos_;
  KnowledgeState seen_;
  bool reached_ = false;
  bool closed_ = false;
  std::size_t steps_ = 0;

  std::vector<ModelState> models_;  // Full, TWG, TW, TG
  SwitchingState switch_s1_;
  SwitchingState switch_s2_;
  std::array<double, 5> acc_s1_{};
  std::array<double, 5> acc_s2_{};
  std::vector<nlohmann::json> frames_;

  mutable std::mutex mu_;
  mutable std::condition_variable cv_;
};

class Service {
 public:
  Service(std::vector<Maze> mazes, ServiceConfig cfg = {});
  ~Service();

  // Request handlers, usable without a socket. Errors are thrown as Error.
  nlohmann::json list_mazes() const;
  /// Body: {"maze", "variant", "condition"[, "goal"]}. Returns {"session", "view"}.
  nlohmann::json create_session(const nlohmann::json& body);
  /// Body: {"action": "U"|"D"|"L"|"R"|"E"}. Returns {"accepted", "reached", "view"}.
  nlohmann::json submit(const std::string& session, const nlohmann::json& body);
  nlohmann::json view(const std::string& session) const;
  std::shared_ptr<Session> session(const std::string& id) const;

  /// Binds the listener (port 0 picks a free one) and returns the port.
  /// Throws Error{PortInUse}.
  int bind(const std::string& host, int port);
  /// Serves until stop().
  void run();
  void stop();

 private:
  void install_routes();

  std::vector<Maze> mazes_;
  ServiceConfig cfg_;
  std::unique_ptr<httplib::Server> server_;
  mutable std::mutex mu_;
  std::map<std::string, std::shared_ptr<Session>> sessions_;
  std::uint64_t next_id_ = 1;
  std::atomic<bool> stopping_{false};
};

}  // namespace btom
