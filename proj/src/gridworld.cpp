#include "btom/gridworld.hpp"

#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace btom {

char to_char(Color c) {
  switch (c) {
    case Color::R: return 'R';
    case Color::B: return 'B';
    case Color::Y: return 'Y';
    case Color::O: return 'O';
  }
  return '?';
}

std::optional<Color> color_from_char(char c) {
  switch (c) {
    case 'R': return Color::R;
    case 'B': return Color::B;
    case 'Y': return Color::Y;
    case 'O': return Color::O;
    default: return std::nullopt;
  }
}

std::string_view color_name(Color c) {
  switch (c) {
    case Color::R: return "red";
    case Color::B: return "blue";
    case Color::Y: return "yellow";
    case Color::O: return "orange";
  }
  return "?";
}

char to_char(Action a) {
  switch (a) {
    case Action::Up: return 'U';
    case Action::Down: return 'D';
    case Action::Left: return 'L';
    case Action::Right: return 'R';
    case Action::Enter: return 'E';
  }
  return '?';
}

std::optional<Action> action_from_char(char c) {
  switch (c) {
    case 'U': return Action::Up;
    case 'D': return Action::Down;
    case 'L': return Action::Left;
    case 'R': return Action::Right;
    case 'E': return Action::Enter;
    default: return std::nullopt;
  }
}

Cell step(Cell c, Action a) {
  switch (a) {
    case Action::Up: return {c.x, c.y - 1};
    case Action::Down: return {c.x, c.y + 1};
    case Action::Left: return {c.x - 1, c.y};
    case Action::Right: return {c.x + 1, c.y};
    case Action::Enter: return c;
  }
  return c;
}

// ---------------------------------------------------------------------------
// Maze

namespace {

std::vector<int> bfs(int width, int height, Cell source, auto&& passable) {
  std::vector<int> dist(static_cast<std::size_t>(width * height), kUnreachable);
  if (!passable(source)) return dist;
  std::vector<int> queue;
  queue.reserve(dist.size());
  const int src = source.y * width + source.x;
  dist[static_cast<std::size_t>(src)] = 0;
  queue.push_back(src);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const int cur = queue[head];
    const Cell c{cur % width, cur / width};
    const int d = dist[static_cast<std::size_t>(cur)] + 1;
    for (Action a : kMoves) {
      const Cell n = step(c, a);
      if (n.x < 0 || n.y < 0 || n.x >= width || n.y >= height) continue;
      const int ni = n.y * width + n.x;
      if (dist[static_cast<std::size_t>(ni)] != kUnreachable || !passable(n)) continue;
      dist[static_cast<std::size_t>(ni)] = d;
      queue.push_back(ni);
    }
  }
  return dist;
}

}  // namespace

Maze::Maze(std::string id, int variant, int width, int height, std::vector<std::uint8_t> walls,
           Cell start, std::array<Exit, 4> exits, std::map<std::string, std::string> meta)
    : id_(std::move(id)),
      variant_(variant),
      width_(width),
      height_(height),
      walls_(std::move(walls)),
      start_(start),
      exits_(exits),
      meta_(std::move(meta)) {
  if (width_ <= 0 || height_ <= 0 || walls_.size() != static_cast<std::size_t>(width_ * height_))
    throw Error(ErrorCode::RaggedRows, "wall grid does not match " + std::to_string(width_) + "x" +
                                           std::to_string(height_));
  if (!in_bounds(start_) || is_wall(start_)) throw Error(ErrorCode::MissingStart, "start must be a free cell");
  std::set<Cell> cells;
  std::set<Color> colors;
  for (const Exit& e : exits_) {
    if (!in_bounds(e.cell) || is_wall(e.cell))
      throw Error(ErrorCode::WrongExitCount, "exit outside the maze or on a wall");
    cells.insert(e.cell);
    colors.insert(e.color);
  }
  if (cells.size() != 4 || colors.size() != 4)
    throw Error(ErrorCode::WrongExitCount, "exits must be 4 distinct cells with 4 distinct colors");
  const auto dist = bfs(width_, height_, start_, [this](Cell c) { return !is_wall(c); });
  for (const Exit& e : exits_) {
    if (dist[static_cast<std::size_t>(index(e.cell))] == kUnreachable)
      throw Error(ErrorCode::UnreachableExit,
                  std::string("exit ") + to_char(e.color) + " cannot be reached from the start");
  }
}

std::optional<Color> Maze::goal() const {
  auto it = meta_.find("goal");
  if (it == meta_.end() || it->second.size() != 1) return std::nullopt;
  return color_from_char(it->second[0]);
}

bool Maze::has_tag(std::string_view tag) const {
  auto it = meta_.find("tags");
  if (it == meta_.end()) return false;
  std::stringstream ss(it->second);
  std::string item;
  while (std::getline(ss, item, ','))
    if (item == tag) return true;
  return false;
}

std::optional<int> Maze::exit_slot(Cell c) const {
  for (int i = 0; i < 4; ++i)
    if (exits_[static_cast<std::size_t>(i)].cell == c) return i;
  return std::nullopt;
}

int Maze::slot_of_color(Color c) const {
  for (int i = 0; i < 4; ++i)
    if (exits_[static_cast<std::size_t>(i)].color == c) return i;
  return -1;  // unreachable for a valid maze
}

std::string Maze::to_text() const {
  std::string out;
  for (const auto& [k, v] : meta_) out += "! " + k + "=" + v + "\n";
  for (int y = 0; y < height_; ++y) {
    for (int x = 0; x < width_; ++x) {
      const Cell c{x, y};
      char ch = is_wall(c) ? '#' : '.';
      if (c == start_) ch = 'S';
      if (auto slot = exit_slot(c)) ch = to_char(exits_[static_cast<std::size_t>(*slot)].color);
      out += ch;
    }
    out += '\n';
  }
  return out;
}

Maze parse_maze(std::string_view text, std::string id, int variant) {
  std::vector<std::string> rows;
  std::map<std::string, std::string> meta;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string line(text.substr(pos, end - pos));
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '%') {
      if (pos > text.size()) break;
      continue;
    }
    if (line[0] == '!') {
      std::stringstream ss(line.substr(1));
      std::string kv;
      while (ss >> kv) {
        auto eq = kv.find('=');
        if (eq == std::string::npos || eq == 0)
          throw Error(ErrorCode::BadMazeSyntax, "malformed header entry '" + kv + "'");
        meta[kv.substr(0, eq)] = kv.substr(eq + 1);
      }
      continue;
    }
    rows.push_back(std::move(line));
  }
  if (rows.empty()) throw Error(ErrorCode::MissingStart, "maze has no grid rows");
  const int width = static_cast<int>(rows.front().size());
  const int height = static_cast<int>(rows.size());
  for (const auto& r : rows)
    if (static_cast<int>(r.size()) != width)
      throw Error(ErrorCode::RaggedRows, "rows must all have length " + std::to_string(width));

  std::vector<std::uint8_t> walls(static_cast<std::size_t>(width * height), 0);
  std::optional<Cell> start;
  std::vector<Exit> exits;
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const char ch = rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
      const Cell c{x, y};
      if (ch == '#') {
        walls[static_cast<std::size_t>(y * width + x)] = 1;
      } else if (ch == 'S') {
        if (start) throw Error(ErrorCode::BadMazeSyntax, "more than one start cell");
        start = c;
      } else if (auto col = color_from_char(ch)) {
        exits.push_back({c, *col});
      } else if (ch != '.') {
        throw Error(ErrorCode::BadMazeSyntax, std::string("unexpected character '") + ch + "'");
      }
    }
  }
  if (!start) throw Error(ErrorCode::MissingStart, "no 'S' cell");
  if (exits.size() != 4)
    throw Error(ErrorCode::WrongExitCount, "found " + std::to_string(exits.size()) + " exits, need 4");
  return Maze(std::move(id), variant, width, height, std::move(walls), *start,
              {exits[0], exits[1], exits[2], exits[3]}, std::move(meta));
}

Maze load_maze_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot open " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  std::string stem = path.stem().string();
  std::string id = stem;
  int variant = 1;
  if (auto p = stem.rfind("_v"); p != std::string::npos && p + 2 < stem.size()) {
    id = stem.substr(0, p);
    variant = std::atoi(stem.c_str() + p + 2);
  }
  return parse_maze(buf.str(), id, variant);
}

std::vector<Maze> load_maze_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) throw Error(ErrorCode::IoError, dir.string() + " is not a directory");
  std::vector<Maze> mazes;
  for (const auto& entry : std::filesystem::directory_iterator(dir))
    if (entry.is_regular_file() && entry.path().extension() == ".maze") mazes.push_back(load_maze_file(entry.path()));
  std::sort(mazes.begin(), mazes.end(), [](const Maze& a, const Maze& b) {
    return std::pair(a.id(), a.variant()) < std::pair(b.id(), b.variant());
  });
  return mazes;
}

// ---------------------------------------------------------------------------
// Visibility

std::vector<Cell> supercover(Cell a, Cell b) {
  const int dx = b.x - a.x;
  const int dy = b.y - a.y;
  const int nx = std::abs(dx);
  const int ny = std::abs(dy);
  const int sx = dx > 0 ? 1 : -1;
  const int sy = dy > 0 ? 1 : -1;
  std::vector<Cell> cells{a};
  Cell p = a;
  for (int ix = 0, iy = 0; ix < nx || iy < ny;) {
    const long decision = static_cast<long>(1 + 2 * ix) * ny - static_cast<long>(1 + 2 * iy) * nx;
    if (decision == 0) {
      // Exact corner crossing: the segment touches both side cells.
      cells.push_back({p.x + sx, p.y});
      cells.push_back({p.x, p.y + sy});
      p.x += sx;
      p.y += sy;
      ++ix;
      ++iy;
    } else if (decision < 0) {
      p.x += sx;
      ++ix;
    } else {
      p.y += sy;
      ++iy;
    }
    cells.push_back(p);
  }
  return cells;
}

bool line_of_sight(const Maze& maze, Cell a, Cell b) {
  if (a == b) return true;
  for (Cell c : supercover(a, b)) {
    if (c == a || c == b) continue;
    if (!maze.in_bounds(c) || maze.is_wall(c)) return false;
  }
  return true;
}

KnowledgeState::KnowledgeState(const Maze& maze)
    : revealed_(static_cast<std::size_t>(maze.cell_count()), 0) {}

int KnowledgeState::identified_exit_count() const {
  int n = 0;
  for (const auto& id : exit_ids_) n += id.has_value() ? 1 : 0;
  return n;
}

bool KnowledgeState::reveal_from(const Maze& maze, Cell pos, int radius) {
  if (revealed_.empty()) revealed_.assign(static_cast<std::size_t>(maze.cell_count()), 0);
  bool changed = false;
  const int x0 = std::max(0, pos.x - radius);
  const int x1 = std::min(maze.width() - 1, pos.x + radius);
  const int y0 = std::max(0, pos.y - radius);
  const int y1 = std::min(maze.height() - 1, pos.y + radius);
  for (int y = y0; y <= y1; ++y) {
    for (int x = x0; x <= x1; ++x) {
      const Cell c{x, y};
      auto& slot = revealed_[static_cast<std::size_t>(maze.index(c))];
      if (slot || !line_of_sight(maze, pos, c)) continue;
      slot = 1;
      ++revealed_count_;
      if (maze.is_wall(c)) ++revealed_wall_count_;
      changed = true;
    }
  }
  for (std::size_t i = 0; i < 4; ++i) {
    const Exit& e = maze.exits()[i];
    if (exit_ids_[i] || !line_of_sight(maze, pos, e.cell)) continue;
    exit_ids_[i] = e.color;
    changed = true;
  }
  return changed;
}

void KnowledgeState::reveal_all(const Maze& maze) {
  revealed_.assign(static_cast<std::size_t>(maze.cell_count()), 1);
  revealed_count_ = maze.cell_count();
  revealed_wall_count_ = static_cast<int>(std::count(maze.walls().begin(), maze.walls().end(), 1));
  for (std::size_t i = 0; i < 4; ++i) exit_ids_[i] = maze.exits()[i].color;
}

KnowledgeState reveal(const Maze& maze, KnowledgeState knowledge, Cell pos, int radius) {
  knowledge.reveal_from(maze, pos, radius);
  return knowledge;
}

// ---------------------------------------------------------------------------
// Moves and distances

std::vector<Action> legal_actions(const Maze& maze, Cell pos) {
  std::vector<Action> out;
  for (Action a : kMoves)
    if (maze.passable(step(pos, a))) out.push_back(a);
  return out;
}

std::vector<Action> legal_actions(const Maze& maze, const KnowledgeState& knowledge, Cell pos) {
  std::vector<Action> out;
  for (Action a : kMoves) {
    const Cell n = step(pos, a);
    if (!maze.in_bounds(n)) continue;
    if (knowledge.revealed(maze, n) && maze.is_wall(n)) continue;
    out.push_back(a);
  }
  return out;
}

std::uint8_t legal_mask(const Maze& maze, Cell pos) {
  std::uint8_t mask = 0;
  for (int i = 0; i < kNumMoves; ++i)
    if (maze.passable(step(pos, kMoves[static_cast<std::size_t>(i)]))) mask |= static_cast<std::uint8_t>(1u << i);
  return mask;
}

std::vector<int> true_distance_field(const Maze& maze, Cell source) {
  return bfs(maze.width(), maze.height(), source, [&maze](Cell c) { return !maze.is_wall(c); });
}

std::vector<int> freespace_distance_field(const Maze& maze, const KnowledgeState& knowledge, Cell source) {
  return bfs(maze.width(), maze.height(), source, [&](Cell c) {
    const int i = maze.index(c);
    return !(knowledge.revealed(i) && maze.is_wall(c));
  });
}

int true_distance(const Maze& maze, Cell from, Cell to) {
  const int d = true_distance_field(maze, to)[static_cast<std::size_t>(maze.index(from))];
  if (d == kUnreachable) throw Error(ErrorCode::Unreachable, "no path between cells");
  return d;
}

int freespace_distance(const Maze& maze, const KnowledgeState& knowledge, Cell from, Cell to) {
  const int d = freespace_distance_field(maze, knowledge, to)[static_cast<std::size_t>(maze.index(from))];
  if (d == kUnreachable) throw Error(ErrorCode::Unreachable, "revealed walls disconnect the cells");
  return d;
}

const std::vector<int>& DistanceOracle::true_field(Cell target) {
  ++true_queries_;
  const int key = maze_->index(target);
  auto it = true_fields_.find(key);
  if (it == true_fields_.end()) it = true_fields_.emplace(key, true_distance_field(*maze_, target)).first;
  return it->second;
}

int DistanceOracle::true_distance(Cell target, Cell from) {
  return true_field(target)[static_cast<std::size_t>(maze_->index(from))];
}

DistanceOracle::PartialField& DistanceOracle::partial(const KnowledgeState& knowledge, Cell target) {
  ++freespace_queries_;
  // Unrevealed cells count as free, so only revealed walls shape the grid.
  // Knowledge only grows along a trajectory, so the wall count identifies
  // the grid within one trajectory evaluation.
  if (knowledge.revealed_wall_count() != free_revision_) {
    free_fields_.clear();
    free_revision_ = knowledge.revealed_wall_count();
  }
  const int key = maze_->index(target);
  auto it = free_fields_.find(key);
  if (it == free_fields_.end()) {
    PartialField f;
    f.dist.assign(static_cast<std::size_t>(maze_->cell_count()), kUnreachable);
    f.queue.reserve(f.dist.size());
    if (!(knowledge.revealed(key) && maze_->is_wall(target))) {
      f.dist[static_cast<std::size_t>(key)] = 0;
      f.queue.push_back(key);
    }
    it = free_fields_.emplace(key, std::move(f)).first;
  }
  return it->second;
}

void DistanceOracle::expand_until(PartialField& f, const KnowledgeState& knowledge, int idx) {
  const int w = maze_->width();
  const int h = maze_->height();
  while (f.head < f.queue.size() && (idx < 0 || f.dist[static_cast<std::size_t>(idx)] == kUnreachable)) {
    const int cur = f.queue[f.head++];
    const Cell c = maze_->cell_at(cur);
    const int d = f.dist[static_cast<std::size_t>(cur)] + 1;
    for (Action a : kMoves) {
      const Cell n = step(c, a);
      if (n.x < 0 || n.y < 0 || n.x >= w || n.y >= h) continue;
      const int ni = n.y * w + n.x;
      if (f.dist[static_cast<std::size_t>(ni)] != kUnreachable) continue;
      if (knowledge.revealed(ni) && maze_->is_wall(n)) continue;
      f.dist[static_cast<std::size_t>(ni)] = d;
      f.queue.push_back(ni);
    }
  }
}

int DistanceOracle::freespace_distance(const KnowledgeState& knowledge, Cell target, Cell from) {
  PartialField& f = partial(knowledge, target);
  const int idx = maze_->index(from);
  expand_until(f, knowledge, idx);
  return f.dist[static_cast<std::size_t>(idx)];
}

const std::vector<int>& DistanceOracle::freespace_field(const KnowledgeState& knowledge, Cell target) {
  PartialField& f = partial(knowledge, target);
  expand_until(f, knowledge, -1);
  return f.dist;
}

void DistanceOracle::reset() {
  true_fields_.clear();
  free_fields_.clear();
  free_revision_ = -1;
}

}  // namespace btom
