#pragma once

// Maze geometry: parsing, visibility, legal moves and grid distances.

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "btom/error.hpp"

namespace btom {

struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

enum class Color : std::uint8_t { R = 0, B = 1, Y = 2, O = 3 };
inline constexpr int kNumColors = 4;
inline constexpr std::array<Color, 4> kAllColors{Color::R, Color::B, Color::Y, Color::O};

char to_char(Color c);
std::optional<Color> color_from_char(char c);
std::string_view color_name(Color c);

/// Movement actions occupy 0..3 so they can index per-action arrays.
enum class Action : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3, Enter = 4 };
inline constexpr int kNumMoves = 4;
inline constexpr std::array<Action, 4> kMoves{Action::Up, Action::Down, Action::Left, Action::Right};

char to_char(Action a);
std::optional<Action> action_from_char(char c);
Cell step(Cell c, Action a);

struct Exit {
  Cell cell;
  Color color;
};

class Maze {
 public:
  /// Validates every structural invariant; throws Error on violation.
  Maze(std::string id, int variant, int width, int height, std::vector<std::uint8_t> walls,
       Cell start, std::array<Exit, 4> exits, std::map<std::string, std::string> meta = {});

  const std::string& id() const { return id_; }
  int variant() const { return variant_; }
  int width() const { return width_; }
  int height() const { return height_; }
  int cell_count() const { return width_ * height_; }
  Cell start() const { return start_; }
  const std::array<Exit, 4>& exits() const { return exits_; }
  const std::vector<std::uint8_t>& walls() const { return walls_; }
  const std::map<std::string, std::string>& meta() const { return meta_; }

  /// Goal color of the trial (`! goal=X` header), if present.
  std::optional<Color> goal() const;
  bool has_tag(std::string_view tag) const;

  bool in_bounds(Cell c) const { return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_; }
  bool is_wall(Cell c) const { return walls_[index(c)] != 0; }
  bool passable(Cell c) const { return in_bounds(c) && !is_wall(c); }
  int index(Cell c) const { return c.y * width_ + c.x; }
  Cell cell_at(int idx) const { return {idx % width_, idx / width_}; }

  /// Exit slot (0..3) occupying `c`, if any.
  std::optional<int> exit_slot(Cell c) const;
  /// Slot of the exit carrying color `c`.
  int slot_of_color(Color c) const;

  /// Grid text (without comment lines) in the same format parse_maze reads.
  std::string to_text() const;

 private:
  std::string id_;
  int variant_;
  int width_;
  int height_;
  std::vector<std::uint8_t> walls_;
  Cell start_;
  std::array<Exit, 4> exits_;
  std::map<std::string, std::string> meta_;
};

/// Text format: equal-length rows of `#` `.` `S` `R` `B` `Y` `O`; `%` starts a
/// comment line; `! key=value ...` lines carry metadata such as `goal=R`.
Maze parse_maze(std::string_view text, std::string id = "maze", int variant = 1);

/// Loads `<id>_v<variant>.maze`; id and variant come from the file name.
Maze load_maze_file(const std::filesystem::path& path);

/// All `*.maze` files of a directory, ordered by (id, variant).
std::vector<Maze> load_maze_dir(const std::filesystem::path& dir);

/// True iff no wall lies strictly between the centers of `a` and `b`.
/// Cells are collected by supercover traversal, so a segment that passes
/// exactly through a grid corner touches both cells beside the corner.
/// Endpoints are not tested, which lets walls be seen but not seen through.
bool line_of_sight(const Maze& maze, Cell a, Cell b);

/// Supercover cells of the segment between two cell centers, endpoints included.
std::vector<Cell> supercover(Cell a, Cell b);

/// Fog-of-war record of one agent.
class KnowledgeState {
 public:
  KnowledgeState() = default;
  explicit KnowledgeState(const Maze& maze);

  bool revealed(int idx) const { return revealed_[static_cast<std::size_t>(idx)] != 0; }
  bool revealed(const Maze& maze, Cell c) const { return revealed(maze.index(c)); }
  int revealed_count() const { return revealed_count_; }
  /// Revealed wall cells; the freespace grid only changes when this grows.
  int revealed_wall_count() const { return revealed_wall_count_; }
  const std::array<std::optional<Color>, 4>& exit_identities() const { return exit_ids_; }
  int identified_exit_count() const;

  /// Marks everything visible from `pos`; returns true if anything new was learned.
  bool reveal_from(const Maze& maze, Cell pos, int radius);

  /// Marks every cell and exit identity as known.
  void reveal_all(const Maze& maze);

  bool operator==(const KnowledgeState&) const = default;

 private:
  std::vector<std::uint8_t> revealed_;
  int revealed_count_ = 0;
  int revealed_wall_count_ = 0;
  std::array<std::optional<Color>, 4> exit_ids_{};
};

/// Value form of KnowledgeState::reveal_from. Cells within Chebyshev `radius`
/// and in line of sight are revealed (walls included); exit identities are
/// revealed by line of sight at any distance.
KnowledgeState reveal(const Maze& maze, KnowledgeState knowledge, Cell pos, int radius);

/// Radius that covers the whole maze.
inline int unlimited_radius(const Maze& maze) { return std::max(maze.width(), maze.height()); }

/// Movement actions whose target is in bounds and not a wall.
std::vector<Action> legal_actions(const Maze& maze, Cell pos);
/// Same, with unrevealed cells counted as free.
std::vector<Action> legal_actions(const Maze& maze, const KnowledgeState& knowledge, Cell pos);
/// Legal-move bitmask (bit i = kMoves[i]) under the true maze.
std::uint8_t legal_mask(const Maze& maze, Cell pos);

inline constexpr int kUnreachable = -1;

/// BFS distances from `source` to every cell; kUnreachable where no path exists.
std::vector<int> true_distance_field(const Maze& maze, Cell source);
/// Same on the relaxed grid where unrevealed cells are free.
std::vector<int> freespace_distance_field(const Maze& maze, const KnowledgeState& knowledge,
                                          Cell source);

/// Shortest 4-connected path length; throws Error{Unreachable}.
int true_distance(const Maze& maze, Cell from, Cell to);
int freespace_distance(const Maze& maze, const KnowledgeState& knowledge, Cell from, Cell to);

/// Per-trajectory distance cache. True-world fields are kept for the whole
/// trajectory; freespace fields are dropped whenever a new wall is revealed. Call reset() between trajectories.
class DistanceOracle {
 public:
  explicit DistanceOracle(const Maze& maze) : maze_(&maze) {}

  /// Distance field to `target` (distances are symmetric).
  const std::vector<int>& true_field(Cell target);
  const std::vector<int>& freespace_field(const KnowledgeState& knowledge, Cell target);

  /// Single entries; kUnreachable when disconnected. Freespace fields are
  /// expanded from the target only as far as the queried cell needs.
  int true_distance(Cell target, Cell from);
  int freespace_distance(const KnowledgeState& knowledge, Cell target, Cell from);

  void reset();

  std::uint64_t true_queries() const { return true_queries_; }
  std::uint64_t freespace_queries() const { return freespace_queries_; }
  const Maze& maze() const { return *maze_; }

 private:
  struct PartialField {
    std::vector<int> dist;
    std::vector<int> queue;
    std::size_t head = 0;
  };
  PartialField& partial(const KnowledgeState& knowledge, Cell target);
  void expand_until(PartialField& f, const KnowledgeState& knowledge, int idx);

  const Maze* maze_;
  std::unordered_map<int, std::vector<int>> true_fields_;
  std::unordered_map<int, PartialField> free_fields_;
  int free_revision_ = -1;
  std::uint64_t true_queries_ = 0;
  std::uint64_t freespace_queries_ = 0;
};

}  // namespace btom
