#pragma once

// The four predictive models as one engine: a clamped hypothesis space,
// its joint posterior and the resulting action prediction.

#include <memory>
#include <string_view>

#include "btom/beliefs.hpp"

namespace btom {

enum class ModelKind : std::uint8_t { FullBToM, TWG, TW, TG };

std::string_view model_name(ModelKind kind);
std::optional<ModelKind> model_kind_from_name(std::string_view name);

struct ModelSpec {
  ModelKind kind = ModelKind::TWG;
  ModelConfig cfg{};

  /// TWG: true goal belief + true world. TW: true world. TG: true goal
  /// belief + freespace. FullBToM: nothing clamped. The desire is never clamped.
  HypothesisClamp clamp(const Maze& maze) const;
  std::size_t space_size() const;
};

class ModelState {
 public:
  /// Uniform prior over the clamped space, conditioned on what is visible
  /// from the start cell. `oracle` must belong to the same maze and may be
  /// shared by models replaying the same trajectory.
  ModelState(ModelSpec spec, const Maze& maze, Color trial_goal,
             std::shared_ptr<DistanceOracle> oracle = nullptr);

  const ModelSpec& spec() const { return spec_; }
  const Maze& maze() const { return *maze_; }
  const JointPosterior& posterior() const { return posterior_; }
  const KnowledgeState& knowledge() const { return knowledge_; }
  Cell pos() const { return pos_; }
  Color trial_goal() const { return trial_goal_; }
  std::size_t steps() const { return steps_; }
  std::size_t zero_mass_resets() const { return zero_mass_resets_; }
  DistanceOracle& oracle() const { return *oracle_; }

  /// Mixture of the hypotheses' policies at the current position.
  ActionDistribution predict() const;

  /// Moves, reveals at the new position, and conditions the posterior on the
  /// action (taken at the old position) and the new observation. Returns
  /// true if the update hit zero mass and was reset. Throws
  /// Error{IllegalAction} for Enter or moves into walls.
  bool advance(Action a);

 private:
  void ensure_likelihoods() const;

  ModelSpec spec_;
  const Maze* maze_;
  Color trial_goal_;
  std::shared_ptr<DistanceOracle> oracle_;
  JointPosterior posterior_;
  KnowledgeState knowledge_;
  Cell pos_;
  std::size_t steps_ = 0;
  std::size_t zero_mass_resets_ = 0;

  // Per-hypothesis policies at pos_, computed on first use each step.
  mutable std::vector<ActionDistribution> policies_;
  mutable bool policies_valid_ = false;
};

}  // namespace btom
