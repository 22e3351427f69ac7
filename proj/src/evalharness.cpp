#include "btom/evalharness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace btom {

std::vector<ModelColumn> default_columns() {
  return {{"Full BToM", ModelKind::FullBToM},
          {"TWG", ModelKind::TWG},
          {"TW", ModelKind::TW},
          {"TG", ModelKind::TG},
          {"Switching", std::nullopt}};
}

ModelColumn column_from_name(const std::string& name) {
  if (name == "Switching") return {"Switching", std::nullopt};
  const auto kind = model_kind_from_name(name);
  if (!kind) throw Error(ErrorCode::InvalidConfig, "unknown model '" + name + "'");
  return {std::string(model_name(*kind)), *kind};
}

MeanStd mean_std(const std::vector<double>& v) {
  MeanStd out;
  out.n = v.size();
  if (v.empty()) return out;
  double sum = 0.0;
  for (double x : v) sum += x;
  out.mean = sum / static_cast<double>(v.size());
  double sq = 0.0;
  for (double x : v) sq += (x - out.mean) * (x - out.mean);
  out.std = std::sqrt(sq / static_cast<double>(v.size()));
  return out;
}

double head_to_head(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size())
    throw Error(ErrorCode::LengthMismatch,
                "head_to_head over " + std::to_string(a.size()) + " vs " + std::to_string(b.size()) + " totals");
  if (a.empty()) return 0.0;
  std::size_t n = 0;
  for (std::size_t k = 0; k < a.size(); ++k) n += a[k] <= b[k] ? 1 : 0;
  return static_cast<double>(n) / static_cast<double>(a.size());
}

std::size_t MetricTables::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw Error(ErrorCode::InvalidConfig, "no column '" + name + "'");
}

std::vector<double> MetricTables::totals(std::size_t column, std::optional<Condition> c, const std::string* maze,
                                         int variant) const {
  std::vector<double> out;
  for (const auto& r : results) {
    if (c && r.condition != *c) continue;
    if (maze && (r.maze != *maze || r.variant != variant)) continue;
    out.push_back(r.totals[column]);
  }
  return out;
}

std::vector<double> MetricTables::millis(std::size_t column, std::optional<Condition> c) const {
  std::vector<double> out;
  for (const auto& r : results)
    if (!c || r.condition == *c) out.push_back(r.millis[column]);
  return out;
}

MeanStd MetricTables::surprise(std::size_t column, std::optional<Condition> c) const {
  return mean_std(totals(column, c));
}

MeanStd MetricTables::timing(std::size_t column, std::optional<Condition> c) const {
  return mean_std(millis(column, c));
}

double MetricTables::wins(std::size_t i, std::size_t j, std::optional<Condition> c) const {
  return head_to_head(totals(i, c), totals(j, c));
}

const Maze& find_maze(const std::vector<Maze>& mazes, const std::string& id, int variant) {
  for (const auto& m : mazes)
    if (m.id() == id && m.variant() == variant) return m;
  throw Error(ErrorCode::UnknownMaze, "no maze " + id + " variant " + std::to_string(variant));
}

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

TrajectoryResult evaluate_trajectory(const Maze& maze, const Trajectory& t, const EvalConfig& cfg) {
  trajectory_positions(maze, t);
  const auto moves = t.moves();
  const auto pool = cfg.pool.empty() ? default_pool(cfg.model) : cfg.pool;
  const std::size_t ncol = cfg.columns.size();

  TrajectoryResult r;
  r.id = t.id();
  r.maze = t.maze;
  r.variant = t.variant;
  r.condition = t.condition;
  r.steps = moves.size();
  r.totals.assign(ncol, 0.0);
  r.millis.assign(ncol, 0.0);
  if (cfg.traces) {
    r.trace.resize(moves.size());
    for (std::size_t k = 0; k < moves.size(); ++k) {
      r.trace[k].action = moves[k];
      r.trace[k].score.assign(ncol, 0.0);
      r.trace[k].entropy.assign(ncol, 0.0);
    }
  }

  for (std::size_t c = 0; c < ncol; ++c) {
    const ModelColumn& col = cfg.columns[c];
    // Fresh cache per trajectory and model.
    auto oracle = std::make_shared<DistanceOracle>(maze);
    double elapsed = 0.0;
    double total = 0.0;
    if (col.kind) {
      ModelState s({*col.kind, cfg.model}, maze, t.goal, oracle);
      for (std::size_t k = 0; k < moves.size(); ++k) {
        if (cfg.traces) r.trace[k].entropy[c] = averaged_entropy(s.posterior());
        const auto t0 = Clock::now();
        total += surprise(cfg.measure, s.predict(), moves[k]);
        s.advance(moves[k]);
        elapsed += ms_since(t0);
        if (cfg.traces) r.trace[k].score[c] = total;
      }
    } else {
      const auto t0 = Clock::now();
      SwitchingState sw(pool, cfg.gamma0, cfg.measure, maze, t.goal, oracle);
      elapsed += ms_since(t0);
      for (std::size_t k = 0; k < moves.size(); ++k) {
        if (cfg.traces) {
          r.trace[k].entropy[c] = averaged_entropy(sw.active_model().posterior());
          r.trace[k].active = sw.active_kind();
        }
        const std::size_t before = sw.reevaluations().size();
        const auto t1 = Clock::now();
        sw.step(moves[k]);
        elapsed += ms_since(t1);
        if (cfg.traces) {
          r.trace[k].score[c] = sw.accumulated();
          if (sw.reevaluations().size() > before) r.trace[k].reevaluation = sw.reevaluations().back();
        }
      }
      total = sw.accumulated();
      r.reevaluations = sw.reevaluations().size();
      r.switches = sw.switch_log();
    }
    r.totals[c] = total;
    r.millis[c] = elapsed;
  }
  return r;
}

MetricTables evaluate_corpus(const std::vector<Maze>& mazes, const std::vector<Trajectory>& corpus,
                             const EvalConfig& cfg) {
  cfg.model.validate();
  if (!(cfg.gamma0 > 0.0)) throw Error(ErrorCode::InvalidConfig, "gamma0 must be positive");
  if (cfg.columns.empty()) throw Error(ErrorCode::InvalidConfig, "no models to evaluate");
  MetricTables out;
  out.measure = cfg.measure;
  for (const auto& c : cfg.columns) out.columns.push_back(c.name);
  for (const auto& t : corpus) {
    const Maze& maze = find_maze(mazes, t.maze, t.variant);
    try {
      out.results.push_back(evaluate_trajectory(maze, t, cfg));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::CorruptTrajectory && e.code() != ErrorCode::IllegalAction) throw;
      out.skipped.push_back({t.id(), e.what()});
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Export

namespace {

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::IoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::IoError, "write failed for " + path.string());
}

const std::array<std::optional<Condition>, 4> kGroups{Condition::NU, Condition::DU, Condition::PU, std::nullopt};

std::string group_name(std::optional<Condition> c) { return c ? std::string(condition_name(*c)) : "Overall"; }

std::string mean_std_header() {
  std::string h;
  for (auto g : kGroups) h += "\t" + group_name(g) + "\t" + group_name(g) + "_std";
  return h;
}

std::string wins_table(const MetricTables& t, std::optional<Condition> c) {
  std::ostringstream out;
  out << "Model";
  for (const auto& name : t.columns) out << '\t' << name;
  out << '\n';
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    out << t.columns[i];
    for (std::size_t j = 0; j < t.columns.size(); ++j) out << '\t' << (i == j ? "--" : fmt(t.wins(i, j, c), 3));
    out << '\n';
  }
  return out.str();
}

}  // namespace

std::string trace_text(const MetricTables& tables, const TrajectoryResult& r) {
  std::ostringstream out;
  out << "step;action";
  for (const auto& name : tables.columns) out << ";score " << name;
  for (const auto& name : tables.columns) out << ";entropy " << name;
  out << ";active;switch\n";
  for (std::size_t k = 0; k < r.trace.size(); ++k) {
    const TraceRow& row = r.trace[k];
    out << k + 1 << ';' << to_char(row.action);
    for (double v : row.score) out << ';' << fmt(v, 6);
    for (double v : row.entropy) out << ';' << fmt(v, 6);
    out << ';' << (row.active ? std::string(model_name(*row.active)) : "");
    out << ';';
    if (row.reevaluation)
      out << model_name(row.reevaluation->from) << "->" << model_name(row.reevaluation->to);
    out << '\n';
  }
  return out.str();
}

void export_tables(const MetricTables& t, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());

  {
    std::ostringstream out;
    out << "Model" << mean_std_header() << '\n';
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      out << t.columns[i];
      for (auto g : kGroups) {
        const auto ms = t.surprise(i, g);
        out << '\t' << fmt(ms.mean, 4) << '\t' << fmt(ms.std, 4);
      }
      out << '\n';
    }
    write_file(dir / "accuracy.tsv", out.str());
  }
  {
    std::set<std::pair<std::string, int>> mazes;
    for (const auto& r : t.results) mazes.insert({r.maze, r.variant});
    std::ostringstream out;
    out << "Maze\tVariant\tModel" << mean_std_header() << '\n';
    for (const auto& [id, variant] : mazes) {
      for (std::size_t i = 0; i < t.columns.size(); ++i) {
        out << id << '\t' << variant << '\t' << t.columns[i];
        for (auto g : kGroups) {
          std::vector<double> v;
          for (const auto& r : t.results)
            if (r.maze == id && r.variant == variant && (!g || r.condition == *g)) v.push_back(r.totals[i]);
          const auto ms = mean_std(v);
          out << '\t' << fmt(ms.mean, 4) << '\t' << fmt(ms.std, 4);
        }
        out << '\n';
      }
    }
    write_file(dir / "accuracy_by_maze.tsv", out.str());
  }
  write_file(dir / "wins.tsv", wins_table(t, std::nullopt));
  for (Condition c : kAllConditions)
    write_file(dir / ("wins_" + std::string(condition_name(c)) + ".tsv"), wins_table(t, c));
  {
    std::ostringstream abs, rel;
    abs << "Model" << mean_std_header() << '\n';
    rel << "Model";
    for (auto g : kGroups) rel << '\t' << group_name(g);
    rel << '\n';
    std::array<double, 4> fastest{};
    for (std::size_t k = 0; k < kGroups.size(); ++k) {
      fastest[k] = -1.0;
      for (std::size_t i = 0; i < t.columns.size(); ++i) {
        const double m = t.timing(i, kGroups[k]).mean;
        if (fastest[k] < 0.0 || m < fastest[k]) fastest[k] = m;
      }
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) {
      abs << t.columns[i];
      rel << t.columns[i];
      for (std::size_t k = 0; k < kGroups.size(); ++k) {
        const auto ms = t.timing(i, kGroups[k]);
        abs << '\t' << fmt(ms.mean, 4) << '\t' << fmt(ms.std, 4);
        rel << '\t' << fmt(fastest[k] > 0.0 ? ms.mean / fastest[k] : 1.0, 2);
      }
      abs << '\n';
      rel << '\n';
    }
    write_file(dir / "timings.tsv", abs.str());
    write_file(dir / "timings_relative.tsv", rel.str());
  }
  {
    std::set<std::string> ids;
    std::set<int> variants;
    for (const auto& r : t.results) {
      ids.insert(r.maze);
      variants.insert(r.variant);
    }
    std::ostringstream out;
    out << "Maze";
    for (int v : variants)
      for (Condition c : kAllConditions) out << '\t' << condition_name(c) << 'V' << v;
    out << '\n';
    for (const auto& id : ids) {
      out << id;
      for (int v : variants)
        for (Condition c : kAllConditions) {
          std::vector<double> n;
          for (const auto& r : t.results)
            if (r.maze == id && r.variant == v && r.condition == c) n.push_back(static_cast<double>(r.reevaluations));
          out << '\t' << (n.empty() ? "--" : fmt(mean_std(n).mean, 2));
        }
      out << '\n';
    }
    write_file(dir / "switches.tsv", out.str());
  }
  if (!t.skipped.empty()) {
    std::ostringstream out;
    out << "Trajectory\tReason\n";
    for (const auto& s : t.skipped) out << s.id << '\t' << s.reason << '\n';
    write_file(dir / "skipped.tsv", out.str());
  }
  bool any_trace = false;
  for (const auto& r : t.results) any_trace = any_trace || !r.trace.empty();
  if (any_trace) {
    std::filesystem::create_directories(dir / "traces", ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot create traces directory: " + ec.message());
    for (const auto& r : t.results)
      if (!r.trace.empty()) write_file(dir / "traces" / (r.id + ".csv"), trace_text(t, r));
  }
}

}  // namespace btom
