#pragma once

// Surprise-triggered switching between specialized models.
//
// One model of the pool is active at a time. Its surprise for every observed
// action is accumulated; once the total exceeds the threshold gamma, every
// pool model replays the episode from scratch and the one with the lowest
// episode surprise becomes active. The accumulated surprise is replaced by
// the winner's episode total and gamma grows by a factor of 1.5.

#include <memory>
#include <optional>
#include <vector>

#include "btom/models.hpp"
#include "btom/surprise.hpp"

namespace btom {

inline constexpr double kGammaGrowth = 1.5;

/// Default initial threshold: 20 for S1, 1.5 for S2.
double default_gamma0(Measure m);

/// [TWG, TW, TG] with the given config.
std::vector<ModelSpec> default_pool(const ModelConfig& cfg = {});

struct SwitchEvent {
  std::size_t step = 0;  // number of actions processed when re-evaluating
  ModelKind from = ModelKind::TWG;
  ModelKind to = ModelKind::TWG;
  double gamma_before = 0.0;

  bool operator==(const SwitchEvent&) const = default;
};

struct ReplayResult {
  std::size_t pool_index = 0;
  ModelState state;
  double surprise = 0.0;
};

/// Replays `episode` through every pool model and returns the best one
/// (lowest total surprise; ties go to `incumbent`, then to pool order).
ReplayResult choose_next_model(const std::vector<ModelSpec>& pool, std::size_t incumbent,
                               const std::vector<Action>& episode, const Maze& maze, Color goal,
                               Measure measure, std::shared_ptr<DistanceOracle> oracle = nullptr);

/// Total surprise a single model assigns to `episode` replayed from the start.
double replay_surprise(ModelState& state, const std::vector<Action>& episode, Measure measure);

class SwitchingState {
 public:
  /// Starts with the pool model that has the smallest hypothesis space.
  /// Throws Error{EmptyPool} or Error{InvalidConfig} for gamma0 <= 0.
  SwitchingState(std::vector<ModelSpec> pool, double gamma0, Measure measure, const Maze& maze,
                 Color goal, std::shared_ptr<DistanceOracle> oracle = nullptr);

  /// Processes one movement action; returns its surprise under the model
  /// that was active before the action.
  double step(Action a);

  const std::vector<ModelSpec>& pool() const { return pool_; }
  std::size_t active_index() const { return active_; }
  ModelKind active_kind() const { return pool_[active_].kind; }
  const ModelState& active_model() const { return *model_; }
  double gamma() const { return gamma_; }
  double accumulated() const { return accumulated_; }
  Measure measure() const { return measure_; }
  const std::vector<Action>& episode() const { return episode_; }
  /// One entry per re-evaluation, including those that kept the incumbent.
  const std::vector<SwitchEvent>& reevaluations() const { return reevaluations_; }
  /// Re-evaluations that changed the active model.
  std::vector<SwitchEvent> switch_log() const;

 private:
  std::vector<ModelSpec> pool_;
  std::size_t active_ = 0;
  double gamma_;
  double accumulated_ = 0.0;
  Measure measure_;
  const Maze* maze_;
  Color goal_;
  std::shared_ptr<DistanceOracle> oracle_;
  std::optional<ModelState> model_;
  std::vector<Action> episode_;
  std::vector<SwitchEvent> reevaluations_;
};

}  // namespace btom
