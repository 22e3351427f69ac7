#pragma once

// Mental-state hypotheses, the joint posterior over them, and the
// likelihoods that drive its update.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "btom/gridworld.hpp"

namespace btom {

enum class WorldBelief : std::uint8_t { TrueWorld = 0, Freespace = 1 };

inline constexpr int kNumGoalBeliefs = 24;
inline constexpr int kNumWorldBeliefs = 2;
inline constexpr int kFullSpaceSize = kNumColors * kNumGoalBeliefs * kNumWorldBeliefs;

/// Color assigned to each exit slot, indexed by goal-belief id (lexicographic
/// order over the permutations of R,B,Y,O).
using ColorAssignment = std::array<Color, 4>;
const std::array<ColorAssignment, kNumGoalBeliefs>& goal_belief_table();
int goal_belief_index(const ColorAssignment& assignment);
/// The goal belief that matches the maze's actual exit colors.
int true_goal_belief(const Maze& maze);

struct MentalStateHypothesis {
  Color goal = Color::R;
  std::uint8_t goal_belief = 0;
  WorldBelief world = WorldBelief::TrueWorld;

  bool operator==(const MentalStateHypothesis&) const = default;
};

/// Exit cell where hypothesis `h` believes its goal color lies.
Cell believed_goal_cell(const Maze& maze, const MentalStateHypothesis& h);

struct HypothesisClamp {
  std::optional<int> goal_belief;
  std::optional<WorldBelief> world;
  std::optional<Color> goal;
};

/// Enumerates goal-major, then goal belief, then world belief.
std::vector<MentalStateHypothesis> hypothesis_space(const HypothesisClamp& clamp = {});

struct ModelConfig {
  double beta = 1.5;
  double theta = 1.0;
  int reveal_radius = 3;

  /// Throws Error{InvalidConfig}.
  void validate() const;
};

class JointPosterior {
 public:
  JointPosterior() = default;
  JointPosterior(std::vector<MentalStateHypothesis> support, std::vector<double> weights);
  static JointPosterior uniform(std::vector<MentalStateHypothesis> support);

  const std::vector<MentalStateHypothesis>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }
  std::size_t size() const { return support_.size(); }

  /// Multiplies weights by `factors` and renormalizes. Returns false (and
  /// leaves the weights untouched) when all mass vanishes.
  [[nodiscard]] bool reweight(std::span<const double> factors);
  void reset_uniform();

 private:
  std::vector<MentalStateHypothesis> support_;
  std::vector<double> weights_;
};

struct Observation {
  Cell agent_pos;
  std::vector<Exit> visible_exits;
};

/// Exits (any distance) in line of sight of `pos`.
Observation observe(const Maze& maze, Cell pos);

/// Probability of each movement action (index = kMoves order); entries for
/// illegal moves are 0.
using ActionDistribution = std::array<double, kNumMoves>;

/// exp(beta * utility) normalized over the moves set in `legal` (bit i =
/// kMoves[i]). At least one bit must be set.
ActionDistribution boltzmann(double beta, const std::array<double, kNumMoves>& utility, std::uint8_t legal);

/// Boltzmann policy of hypothesis `h` at `pos`, normalized over the moves
/// legal in the true maze. Utilities are negated distances to the believed
/// goal: true distances for TrueWorld, freespace distances under `knowledge`
/// otherwise. Throws Error{UnreachableGoal} if the goal cannot be reached
/// from any legal successor.
ActionDistribution action_distribution(const ModelConfig& cfg, const Maze& maze,
                                       const KnowledgeState& knowledge,
                                       const MentalStateHypothesis& h, Cell pos,
                                       DistanceOracle& oracle);

/// Same but falls back to uniform over legal moves for unreachable goals.
ActionDistribution action_distribution_or_uniform(const ModelConfig& cfg, const Maze& maze,
                                                  const KnowledgeState& knowledge,
                                                  const MentalStateHypothesis& h, Cell pos,
                                                  DistanceOracle& oracle);

/// Single entry of action_distribution.
double action_likelihood(const ModelConfig& cfg, const Maze& maze, const KnowledgeState& knowledge,
                         const MentalStateHypothesis& h, Cell pos, Action a);

/// theta^matches * (1-theta)^mismatches over the visible exits.
double observation_likelihood(const Maze& maze, const Observation& obs,
                              const MentalStateHypothesis& h, double theta);

struct UpdateResult {
  JointPosterior posterior;
  /// All mass vanished and the posterior was reset to uniform.
  bool zero_mass_reset = false;
};

UpdateResult posterior_update(const ModelConfig& cfg, const Maze& maze,
                              const KnowledgeState& knowledge, const JointPosterior& post, Cell pos,
                              Action a, const Observation& obs);

/// Update with precomputed per-hypothesis action likelihoods.
UpdateResult posterior_update(const ModelConfig& cfg, const Maze& maze, const JointPosterior& post,
                              std::span<const double> action_likelihoods, const Observation& obs);

struct Marginals {
  std::array<double, kNumColors> goal{};
  std::array<double, kNumGoalBeliefs> goal_belief{};
  std::array<double, kNumWorldBeliefs> world{};
};

Marginals marginals(const JointPosterior& post);

/// Shannon entropy in nats.
double entropy(std::span<const double> p);

/// Mean of the three marginal entropies.
double averaged_entropy(const JointPosterior& post);

}  // namespace btom
