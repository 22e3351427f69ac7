#include "btom/simagents.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"

namespace btom {

std::string_view condition_name(Condition c) {
  switch (c) {
    case Condition::NU: return "NU";
    case Condition::DU: return "DU";
    case Condition::PU: return "PU";
  }
  return "?";
}

std::optional<Condition> condition_from_name(std::string_view name) {
  if (name == "NU") return Condition::NU;
  if (name == "DU") return Condition::DU;
  if (name == "PU") return Condition::PU;
  return std::nullopt;
}

int condition_radius(Condition c, const Maze& maze) { return c == Condition::PU ? 3 : unlimited_radius(maze); }

std::string Trajectory::id() const {
  return maze + "-v" + std::to_string(variant) + "-" + std::string(condition_name(condition)) + "-" +
         std::to_string(seed);
}

std::vector<Action> Trajectory::moves() const {
  std::vector<Action> out;
  for (Action a : actions)
    if (a != Action::Enter) out.push_back(a);
  return out;
}

std::vector<Cell> trajectory_positions(const Maze& maze, const Trajectory& t) {
  std::vector<Cell> cells{maze.start()};
  const Cell goal = maze.exits()[static_cast<std::size_t>(maze.slot_of_color(t.goal))].cell;
  for (std::size_t i = 0; i < t.actions.size(); ++i) {
    const Action a = t.actions[i];
    if (a == Action::Enter) {
      if (i + 1 != t.actions.size())
        throw Error(ErrorCode::CorruptTrajectory, t.id() + ": Enter before the end");
      continue;
    }
    const Cell next = step(cells.back(), a);
    if (!maze.passable(next))
      throw Error(ErrorCode::CorruptTrajectory, t.id() + ": wall hit at step " + std::to_string(i));
    cells.push_back(next);
  }
  if (t.actions.empty() || t.actions.back() != Action::Enter || cells.back() != goal)
    throw Error(ErrorCode::CorruptTrajectory, t.id() + ": does not end with Enter on the goal exit");
  return cells;
}

std::size_t step_limit(const Maze& maze, Color goal) {
  const Cell g = maze.exits()[static_cast<std::size_t>(maze.slot_of_color(goal))].cell;
  return 50 * static_cast<std::size_t>(std::max(1, true_distance(maze, maze.start(), g)));
}

namespace {

/// Samples a legal move with probability proportional to exp(-beta * d),
/// d being the target distance after the move.
Action sample_move(const Maze& maze, Cell pos, const std::vector<int>& field, double beta, Rng& rng) {
  std::array<double, kNumMoves> w{};
  int best = -1;
  for (std::size_t i = 0; i < kMoves.size(); ++i) {
    const Cell n = step(pos, kMoves[i]);
    if (!maze.passable(n)) continue;
    const int d = field[static_cast<std::size_t>(maze.index(n))];
    if (d != kUnreachable && (best < 0 || d < best)) best = d;
  }
  double total = 0.0;
  for (std::size_t i = 0; i < kMoves.size(); ++i) {
    const Cell n = step(pos, kMoves[i]);
    if (!maze.passable(n)) continue;
    const int d = field[static_cast<std::size_t>(maze.index(n))];
    // Unreachable targets leave a uniform random walk.
    w[i] = best < 0 ? 1.0 : (d == kUnreachable ? 0.0 : std::exp(-beta * (d - best)));
    total += w[i];
  }
  double u = rng.uniform() * total;
  std::size_t pick = 0;
  for (std::size_t i = 0; i < kMoves.size(); ++i) {
    if (w[i] <= 0.0) continue;
    pick = i;
    if (u < w[i]) break;
    u -= w[i];
  }
  return kMoves[pick];
}

struct Walk {
  Trajectory traj;
  Cell pos;
  Cell goal;
  std::size_t limit;

  Walk(const Maze& maze, Condition c, Color goal_color, std::uint64_t seed)
      : traj{maze.id(), maze.variant(), c, goal_color, seed, {}},
        pos(maze.start()),
        goal(maze.exits()[static_cast<std::size_t>(maze.slot_of_color(goal_color))].cell),
        limit(step_limit(maze, goal_color)) {}

  void move(Action a) {
    if (traj.actions.size() >= limit)
      throw Error(ErrorCode::StepLimitExceeded, traj.id() + " exceeded " + std::to_string(limit) + " steps");
    traj.actions.push_back(a);
    pos = step(pos, a);
  }

  Trajectory finish() {
    traj.actions.push_back(Action::Enter);
    return std::move(traj);
  }
};

}  // namespace

Trajectory generate_nu(const Maze& maze, Color goal, double beta, std::uint64_t seed) {
  Walk w(maze, Condition::NU, goal, seed);
  Rng rng(seed);
  const auto field = true_distance_field(maze, w.goal);
  while (w.pos != w.goal) w.move(sample_move(maze, w.pos, field, beta, rng));
  return w.finish();
}

Trajectory generate_du(const Maze& maze, Color goal, double beta, std::uint64_t seed) {
  Walk w(maze, Condition::DU, goal, seed);
  Rng rng(seed);
  const int goal_slot = maze.slot_of_color(goal);
  KnowledgeState known(maze);
  known.reveal_from(maze, w.pos, unlimited_radius(maze));
  int target = -1;
  std::vector<std::vector<int>> fields;
  for (const Exit& e : maze.exits()) fields.push_back(true_distance_field(maze, e.cell));

  while (w.pos != w.goal) {
    const auto& ids = known.exit_identities();
    if (ids[static_cast<std::size_t>(goal_slot)]) {
      target = goal_slot;
    } else if (target < 0 || ids[static_cast<std::size_t>(target)]) {
      // Commit to the nearest exit whose color is still unknown.
      target = -1;
      int best = -1;
      for (int s = 0; s < 4; ++s) {
        if (ids[static_cast<std::size_t>(s)]) continue;
        const int d = fields[static_cast<std::size_t>(s)][static_cast<std::size_t>(maze.index(w.pos))];
        if (target < 0 || d < best) {
          target = s;
          best = d;
        }
      }
    }
    w.move(sample_move(maze, w.pos, fields[static_cast<std::size_t>(target)], beta, rng));
    known.reveal_from(maze, w.pos, unlimited_radius(maze));
  }
  return w.finish();
}

Trajectory generate_pu(const Maze& maze, Color goal, double beta, std::uint64_t seed) {
  Walk w(maze, Condition::PU, goal, seed);
  Rng rng(seed);
  KnowledgeState known(maze);
  known.reveal_from(maze, w.pos, condition_radius(Condition::PU, maze));
  auto field = freespace_distance_field(maze, known, w.goal);
  while (w.pos != w.goal) {
    w.move(sample_move(maze, w.pos, field, beta, rng));
    if (known.reveal_from(maze, w.pos, condition_radius(Condition::PU, maze)))
      field = freespace_distance_field(maze, known, w.goal);
  }
  return w.finish();
}

Trajectory generate(Condition c, const Maze& maze, Color goal, double beta, std::uint64_t seed) {
  switch (c) {
    case Condition::NU: return generate_nu(maze, goal, beta, seed);
    case Condition::DU: return generate_du(maze, goal, beta, seed);
    case Condition::PU: return generate_pu(maze, goal, beta, seed);
  }
  return generate_nu(maze, goal, beta, seed);
}

// ---------------------------------------------------------------------------
// Corpus records

std::string to_record(const Trajectory& t) {
  std::string actions;
  for (Action a : t.actions) actions += to_char(a);
  nlohmann::ordered_json j;
  j["maze"] = t.maze;
  j["variant"] = t.variant;
  j["condition"] = condition_name(t.condition);
  j["goal"] = std::string(1, to_char(t.goal));
  j["seed"] = t.seed;
  j["actions"] = actions;
  return j.dump();
}

Trajectory parse_record(std::string_view line) {
  try {
    const auto j = nlohmann::json::parse(line);
    Trajectory t;
    t.maze = j.at("maze").get<std::string>();
    t.variant = j.at("variant").get<int>();
    const auto cond = condition_from_name(j.at("condition").get<std::string>());
    const auto goal = j.at("goal").get<std::string>();
    if (!cond || goal.size() != 1 || !color_from_char(goal[0]))
      throw Error(ErrorCode::BadRecord, "bad condition or goal");
    t.condition = *cond;
    t.goal = *color_from_char(goal[0]);
    t.seed = j.at("seed").get<std::uint64_t>();
    for (char c : j.at("actions").get<std::string>()) {
      auto a = action_from_char(c);
      if (!a) throw Error(ErrorCode::BadRecord, std::string("bad action '") + c + "'");
      t.actions.push_back(*a);
    }
    return t;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::BadRecord, e.what());
  }
}

void write_corpus(const std::filesystem::path& path, const std::vector<Trajectory>& corpus) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  for (const auto& t : corpus) out << to_record(t) << '\n';
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

std::vector<Trajectory> read_corpus(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::vector<Trajectory> out;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(parse_record(line));
  return out;
}

}  // namespace btom
