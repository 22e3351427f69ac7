#pragma once

// Synthetic agents for the three presentation conditions, and the
// trajectory corpus format.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "btom/gridworld.hpp"

namespace btom {

enum class Condition : std::uint8_t { NU = 0, DU = 1, PU = 2 };
inline constexpr std::array<Condition, 3> kAllConditions{Condition::NU, Condition::DU, Condition::PU};

std::string_view condition_name(Condition c);
std::optional<Condition> condition_from_name(std::string_view name);

/// Reveal radius the condition shows the agent (3 for PU, whole maze otherwise).
int condition_radius(Condition c, const Maze& maze);

struct Trajectory {
  std::string maze;
  int variant = 1;
  Condition condition = Condition::NU;
  Color goal = Color::R;
  std::uint64_t seed = 0;
  /// Movement actions followed by a single terminal Enter.
  std::vector<Action> actions;

  std::string id() const;
  /// Movement actions only.
  std::vector<Action> moves() const;
  std::size_t step_count() const { return moves().size(); }
  bool operator==(const Trajectory&) const = default;
};

/// Replays `t` from the maze start and returns every visited cell (start
/// included). Throws Error{CorruptTrajectory} on a wall hit, a misplaced
/// Enter, or a final cell that is not the goal exit.
std::vector<Cell> trajectory_positions(const Maze& maze, const Trajectory& t);

/// Step cap for generators: 50 times the optimal path length.
std::size_t step_limit(const Maze& maze, Color goal);

/// Boltzmann-optimal walker over true distances to the goal.
Trajectory generate_nu(const Maze& maze, Color goal, double beta, std::uint64_t seed);
/// Walks to the nearest exit whose color is still unknown until the goal's
/// exit is identified, then heads to it.
Trajectory generate_du(const Maze& maze, Color goal, double beta, std::uint64_t seed);
/// Greedy homing: radius-3 fog of war, freespace distances to the known goal.
Trajectory generate_pu(const Maze& maze, Color goal, double beta, std::uint64_t seed);

Trajectory generate(Condition c, const Maze& maze, Color goal, double beta, std::uint64_t seed);

/// One JSON object per line with keys maze, variant, condition, goal, seed,
/// actions (in that order); actions is a string over U, D, L, R, E.
std::string to_record(const Trajectory& t);
Trajectory parse_record(std::string_view line);

void write_corpus(const std::filesystem::path& path, const std::vector<Trajectory>& corpus);
std::vector<Trajectory> read_corpus(const std::filesystem::path& path);

/// Deterministic 64-bit stream (mt19937_64) with a portable uniform draw.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  /// Uniform double in [0, 1) from the top 53 bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace btom
