#include "btom/beliefs.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <limits>
#include <numeric>

namespace btom {

namespace {

std::array<ColorAssignment, kNumGoalBeliefs> build_goal_belief_table() {
  std::array<ColorAssignment, kNumGoalBeliefs> table{};
  ColorAssignment perm = kAllColors;
  std::size_t i = 0;
  do {
    table[i++] = perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return table;
}

}  // namespace

const std::array<ColorAssignment, kNumGoalBeliefs>& goal_belief_table() {
  static const auto table = build_goal_belief_table();
  return table;
}

int goal_belief_index(const ColorAssignment& assignment) {
  const auto& table = goal_belief_table();
  auto it = std::find(table.begin(), table.end(), assignment);
  if (it == table.end()) throw Error(ErrorCode::InvalidConfig, "color assignment is not a permutation");
  return static_cast<int>(it - table.begin());
}

int true_goal_belief(const Maze& maze) {
  ColorAssignment a{};
  for (std::size_t i = 0; i < 4; ++i) a[i] = maze.exits()[i].color;
  return goal_belief_index(a);
}

Cell believed_goal_cell(const Maze& maze, const MentalStateHypothesis& h) {
  const ColorAssignment& assignment = goal_belief_table()[h.goal_belief];
  for (std::size_t slot = 0; slot < 4; ++slot)
    if (assignment[slot] == h.goal) return maze.exits()[slot].cell;
  return maze.exits()[0].cell;  // every assignment is a bijection
}

std::vector<MentalStateHypothesis> hypothesis_space(const HypothesisClamp& clamp) {
  if (clamp.goal_belief && (*clamp.goal_belief < 0 || *clamp.goal_belief >= kNumGoalBeliefs))
    throw Error(ErrorCode::InvalidConfig, "goal belief clamp out of range");
  std::vector<MentalStateHypothesis> out;
  for (Color g : kAllColors) {
    if (clamp.goal && *clamp.goal != g) continue;
    for (int bg = 0; bg < kNumGoalBeliefs; ++bg) {
      if (clamp.goal_belief && *clamp.goal_belief != bg) continue;
      for (WorldBelief bw : {WorldBelief::TrueWorld, WorldBelief::Freespace}) {
        if (clamp.world && *clamp.world != bw) continue;
        out.push_back({g, static_cast<std::uint8_t>(bg), bw});
      }
    }
  }
  return out;
}

void ModelConfig::validate() const {
  if (!(beta >= 0.0) || !std::isfinite(beta)) throw Error(ErrorCode::InvalidConfig, "beta must be >= 0");
  if (!(theta > 0.0 && theta <= 1.0)) throw Error(ErrorCode::InvalidConfig, "theta must be in (0, 1]");
  if (reveal_radius < 0) throw Error(ErrorCode::InvalidConfig, "reveal radius must be >= 0");
}

// ---------------------------------------------------------------------------
// JointPosterior

JointPosterior::JointPosterior(std::vector<MentalStateHypothesis> support, std::vector<double> weights)
    : support_(std::move(support)), weights_(std::move(weights)) {
  if (support_.size() != weights_.size() || support_.empty())
    throw Error(ErrorCode::InvalidConfig, "posterior support and weights differ in size");
  double total = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw Error(ErrorCode::InvalidConfig, "negative posterior weight");
    total += w;
  }
  if (!(total > 0.0)) throw Error(ErrorCode::ZeroMass, "posterior has no mass");
  for (double& w : weights_) w /= total;
}

JointPosterior JointPosterior::uniform(std::vector<MentalStateHypothesis> support) {
  std::vector<double> w(support.size(), 1.0);
  return JointPosterior(std::move(support), std::move(w));
}

bool JointPosterior::reweight(std::span<const double> factors) {
  double total = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) total += weights_[i] * factors[i];
  if (!(total > 0.0) || !std::isfinite(total)) return false;
  for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] = weights_[i] * factors[i] / total;
  return true;
}

void JointPosterior::reset_uniform() {
  std::fill(weights_.begin(), weights_.end(), 1.0 / static_cast<double>(weights_.size()));
}

// ---------------------------------------------------------------------------
// Likelihoods

Observation observe(const Maze& maze, Cell pos) {
  Observation obs{pos, {}};
  for (const Exit& e : maze.exits())
    if (line_of_sight(maze, pos, e.cell)) obs.visible_exits.push_back(e);
  return obs;
}

ActionDistribution boltzmann(double beta, const std::array<double, kNumMoves>& utility, std::uint8_t legal) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < utility.size(); ++i)
    if (legal & (1u << i)) best = std::max(best, utility[i]);
  ActionDistribution p{};
  double total = 0.0;
  for (std::size_t i = 0; i < utility.size(); ++i) {
    if (!(legal & (1u << i))) continue;
    // Shifted by the best utility so the exponent is never positive.
    p[i] = std::exp(beta * (utility[i] - best));
    total += p[i];
  }
  for (double& v : p) v /= total;
  return p;
}

ActionDistribution action_distribution(const ModelConfig& cfg, const Maze& maze,
                                       const KnowledgeState& knowledge,
                                       const MentalStateHypothesis& h, Cell pos,
                                       DistanceOracle& oracle) {
  const Cell goal = believed_goal_cell(maze, h);
  std::array<double, kNumMoves> utility{};
  std::uint8_t reachable = 0;
  for (std::size_t i = 0; i < kMoves.size(); ++i) {
    const Cell n = step(pos, kMoves[i]);
    if (!maze.passable(n)) continue;
    const int d = h.world == WorldBelief::TrueWorld ? oracle.true_distance(goal, n)
                                                    : oracle.freespace_distance(knowledge, goal, n);
    if (d == kUnreachable) continue;
    utility[i] = -static_cast<double>(d);
    reachable |= static_cast<std::uint8_t>(1u << i);
  }
  if (!reachable) throw Error(ErrorCode::UnreachableGoal, "believed goal cell is unreachable");
  return boltzmann(cfg.beta, utility, reachable);
}

ActionDistribution action_distribution_or_uniform(const ModelConfig& cfg, const Maze& maze,
                                                  const KnowledgeState& knowledge,
                                                  const MentalStateHypothesis& h, Cell pos,
                                                  DistanceOracle& oracle) {
  try {
    return action_distribution(cfg, maze, knowledge, h, pos, oracle);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::UnreachableGoal) throw;
  }
  ActionDistribution p{};
  const std::uint8_t mask = legal_mask(maze, pos);
  const int n = std::popcount(mask);
  for (int i = 0; i < kNumMoves; ++i)
    if (mask & (1u << i)) p[static_cast<std::size_t>(i)] = 1.0 / n;
  return p;
}

double action_likelihood(const ModelConfig& cfg, const Maze& maze, const KnowledgeState& knowledge,
                         const MentalStateHypothesis& h, Cell pos, Action a) {
  if (a == Action::Enter) throw Error(ErrorCode::IllegalAction, "Enter has no movement likelihood");
  if (!maze.passable(step(pos, a))) throw Error(ErrorCode::IllegalAction, "move into a wall");
  DistanceOracle oracle(maze);
  return action_distribution(cfg, maze, knowledge, h, pos, oracle)[static_cast<std::size_t>(a)];
}

double observation_likelihood(const Maze& maze, const Observation& obs,
                              const MentalStateHypothesis& h, double theta) {
  const ColorAssignment& assignment = goal_belief_table()[h.goal_belief];
  double p = 1.0;
  for (const Exit& e : obs.visible_exits) {
    const auto slot = maze.exit_slot(e.cell);
    const bool match = slot && assignment[static_cast<std::size_t>(*slot)] == e.color;
    p *= match ? theta : (1.0 - theta);
  }
  return p;
}

UpdateResult posterior_update(const ModelConfig& cfg, const Maze& maze, const JointPosterior& post,
                              std::span<const double> action_likelihoods, const Observation& obs) {
  std::vector<double> factors(post.size());
  for (std::size_t i = 0; i < post.size(); ++i)
    factors[i] = action_likelihoods[i] * observation_likelihood(maze, obs, post.support()[i], cfg.theta);
  UpdateResult result{post, false};
  if (!result.posterior.reweight(factors)) {
    result.posterior.reset_uniform();
    result.zero_mass_reset = true;
  }
  return result;
}

UpdateResult posterior_update(const ModelConfig& cfg, const Maze& maze,
                              const KnowledgeState& knowledge, const JointPosterior& post, Cell pos,
                              Action a, const Observation& obs) {
  if (a == Action::Enter || !maze.passable(step(pos, a)))
    throw Error(ErrorCode::IllegalAction, "update needs a legal movement action");
  DistanceOracle oracle(maze);
  std::vector<double> lik(post.size());
  for (std::size_t i = 0; i < post.size(); ++i)
    lik[i] = action_distribution_or_uniform(cfg, maze, knowledge, post.support()[i], pos, oracle)
        [static_cast<std::size_t>(a)];
  return posterior_update(cfg, maze, post, lik, obs);
}

// ---------------------------------------------------------------------------
// Summaries

Marginals marginals(const JointPosterior& post) {
  Marginals m;
  for (std::size_t i = 0; i < post.size(); ++i) {
    const auto& h = post.support()[i];
    const double w = post.weights()[i];
    m.goal[static_cast<std::size_t>(h.goal)] += w;
    m.goal_belief[h.goal_belief] += w;
    m.world[static_cast<std::size_t>(h.world)] += w;
  }
  return m;
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double v : p)
    if (v > 0.0) h -= v * std::log(v);
  return h;
}

double averaged_entropy(const JointPosterior& post) {
  const Marginals m = marginals(post);
  return (entropy(m.goal) + entropy(m.goal_belief) + entropy(m.world)) / 3.0;
}

}  // namespace btom
