#include "btom/models.hpp"

namespace btom {

std::string_view model_name(ModelKind kind) {
  switch (kind) {
    case ModelKind::FullBToM: return "Full BToM";
    case ModelKind::TWG: return "TWG";
    case ModelKind::TW: return "TW";
    case ModelKind::TG: return "TG";
  }
  return "?";
}

std::optional<ModelKind> model_kind_from_name(std::string_view name) {
  if (name == "Full" || name == "FullBToM" || name == "Full BToM") return ModelKind::FullBToM;
  if (name == "TWG") return ModelKind::TWG;
  if (name == "TW") return ModelKind::TW;
  if (name == "TG") return ModelKind::TG;
  return std::nullopt;
}

HypothesisClamp ModelSpec::clamp(const Maze& maze) const {
  switch (kind) {
    case ModelKind::FullBToM: return {};
    case ModelKind::TWG: return {true_goal_belief(maze), WorldBelief::TrueWorld, std::nullopt};
    case ModelKind::TW: return {std::nullopt, WorldBelief::TrueWorld, std::nullopt};
    case ModelKind::TG: return {true_goal_belief(maze), WorldBelief::Freespace, std::nullopt};
  }
  return {};
}

std::size_t ModelSpec::space_size() const {
  switch (kind) {
    case ModelKind::FullBToM: return kFullSpaceSize;
    case ModelKind::TWG: return kNumColors;
    case ModelKind::TW: return kNumColors * kNumGoalBeliefs;
    case ModelKind::TG: return kNumColors;
  }
  return 0;
}

ModelState::ModelState(ModelSpec spec, const Maze& maze, Color trial_goal,
                       std::shared_ptr<DistanceOracle> oracle)
    : spec_(spec),
      maze_(&maze),
      trial_goal_(trial_goal),
      oracle_(oracle ? std::move(oracle) : std::make_shared<DistanceOracle>(maze)),
      posterior_(JointPosterior::uniform(hypothesis_space(spec.clamp(maze)))),
      knowledge_(maze),
      pos_(maze.start()) {
  spec_.cfg.validate();
  knowledge_.reveal_from(maze, pos_, spec_.cfg.reveal_radius);
  const Observation obs = observe(maze, pos_);
  if (!obs.visible_exits.empty()) {
    const std::vector<double> ones(posterior_.size(), 1.0);
    auto res = posterior_update(spec_.cfg, maze, posterior_, ones, obs);
    posterior_ = std::move(res.posterior);
    zero_mass_resets_ += res.zero_mass_reset ? 1 : 0;
  }
}

void ModelState::ensure_likelihoods() const {
  if (policies_valid_) return;
  policies_.resize(posterior_.size());
  for (std::size_t i = 0; i < posterior_.size(); ++i)
    policies_[i] = action_distribution_or_uniform(spec_.cfg, *maze_, knowledge_, posterior_.support()[i],
                                                  pos_, *oracle_);
  policies_valid_ = true;
}

ActionDistribution ModelState::predict() const {
  ensure_likelihoods();
  ActionDistribution p{};
  const auto& w = posterior_.weights();
  for (std::size_t i = 0; i < policies_.size(); ++i) {
    if (w[i] == 0.0) continue;
    for (std::size_t a = 0; a < p.size(); ++a) p[a] += w[i] * policies_[i][a];
  }
  return p;
}

bool ModelState::advance(Action a) {
  if (a == Action::Enter) throw Error(ErrorCode::IllegalAction, "Enter is not a movement");
  const Cell next = step(pos_, a);
  if (!maze_->passable(next))
    throw Error(ErrorCode::IllegalAction, std::string("move '") + to_char(a) + "' hits a wall at step " +
                                              std::to_string(steps_));
  ensure_likelihoods();
  std::vector<double> lik(posterior_.size());
  for (std::size_t i = 0; i < lik.size(); ++i) lik[i] = policies_[i][static_cast<std::size_t>(a)];

  pos_ = next;
  knowledge_.reveal_from(*maze_, pos_, spec_.cfg.reveal_radius);
  auto res = posterior_update(spec_.cfg, *maze_, posterior_, lik, observe(*maze_, pos_));
  posterior_ = std::move(res.posterior);
  zero_mass_resets_ += res.zero_mass_reset ? 1 : 0;
  policies_valid_ = false;
  ++steps_;
  return res.zero_mass_reset;
}

}  // namespace btom
