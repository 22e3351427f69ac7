#pragma once

// Corpus replay through every model, the summary tables built from it, and
// per-step traces.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "btom/simagents.hpp"
#include "btom/switching.hpp"

namespace btom {

/// One evaluated column: a single model, or Switching when `kind` is empty.
struct ModelColumn {
  std::string name;
  std::optional<ModelKind> kind;
};

/// Full BToM, TWG, TW, TG, Switching.
std::vector<ModelColumn> default_columns();
/// Accepts "Full", "TWG", "TW", "TG", "Switching" (and "Full BToM").
ModelColumn column_from_name(const std::string& name);

struct EvalConfig {
  ModelConfig model{};
  Measure measure = Measure::S1;
  double gamma0 = 20.0;
  std::vector<ModelSpec> pool;  // empty: default_pool(model)
  std::vector<ModelColumn> columns = default_columns();
  /// Record per-step score/entropy rows.
  bool traces = false;
};

struct TraceRow {
  Action action = Action::Up;
  std::vector<double> score;    // accumulated surprise per column, after this step
  std::vector<double> entropy;  // averaged entropy of the belief used to predict this step
  std::optional<ModelKind> active;  // Switching's model for this step, if evaluated
  std::optional<SwitchEvent> reevaluation;
};

struct TrajectoryResult {
  std::string id;
  std::string maze;
  int variant = 1;
  Condition condition = Condition::NU;
  std::size_t steps = 0;
  std::vector<double> totals;  // per column
  std::vector<double> millis;  // per column
  std::size_t reevaluations = 0;
  std::vector<SwitchEvent> switches;
  std::vector<TraceRow> trace;  // empty unless EvalConfig::traces
};

struct Skipped {
  std::string id;
  std::string reason;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // population
  std::size_t n = 0;
};

MeanStd mean_std(const std::vector<double>& v);

struct MetricTables {
  std::vector<std::string> columns;
  Measure measure = Measure::S1;
  std::vector<TrajectoryResult> results;
  std::vector<Skipped> skipped;

  std::size_t column_index(const std::string& name) const;
  /// Totals of one column, optionally filtered by condition and maze/variant.
  std::vector<double> totals(std::size_t column, std::optional<Condition> c = std::nullopt,
                             const std::string* maze = nullptr, int variant = 0) const;
  std::vector<double> millis(std::size_t column, std::optional<Condition> c = std::nullopt) const;
  MeanStd surprise(std::size_t column, std::optional<Condition> c = std::nullopt) const;
  MeanStd timing(std::size_t column, std::optional<Condition> c = std::nullopt) const;
  /// Fraction of trajectories where column i scored <= column j.
  double wins(std::size_t i, std::size_t j, std::optional<Condition> c = std::nullopt) const;
};

/// Fraction of positions where a[k] <= b[k]. Throws Error{LengthMismatch}.
double head_to_head(const std::vector<double>& a, const std::vector<double>& b);

/// Replays `t` through every configured column, each with a fresh distance
/// cache. Throws Error{CorruptTrajectory} for an invalid trajectory.
TrajectoryResult evaluate_trajectory(const Maze& maze, const Trajectory& t, const EvalConfig& cfg);

/// Throws Error{UnknownMaze} when a trajectory names a maze not in `mazes`.
/// Corrupt trajectories are skipped and listed in MetricTables::skipped.
MetricTables evaluate_corpus(const std::vector<Maze>& mazes, const std::vector<Trajectory>& corpus,
                             const EvalConfig& cfg);

const Maze& find_maze(const std::vector<Maze>& mazes, const std::string& id, int variant);

/// Writes accuracy.tsv, accuracy_by_maze.tsv, wins*.tsv, timings*.tsv and
/// switches.tsv into `dir`, plus traces/<id>.csv when traces were recorded.
void export_tables(const MetricTables& tables, const std::filesystem::path& dir);

/// Semicolon-separated trace with a header row.
std::string trace_text(const MetricTables& tables, const TrajectoryResult& r);

}  // namespace btom
