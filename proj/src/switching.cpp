#include "btom/switching.hpp"

#include <algorithm>

namespace btom {

double default_gamma0(Measure m) { return m == Measure::S1 ? 20.0 : 1.5; }

std::vector<ModelSpec> default_pool(const ModelConfig& cfg) {
  return {{ModelKind::TWG, cfg}, {ModelKind::TW, cfg}, {ModelKind::TG, cfg}};
}

double replay_surprise(ModelState& state, const std::vector<Action>& episode, Measure measure) {
  double total = 0.0;
  for (Action a : episode) {
    total += surprise(measure, state.predict(), a);
    state.advance(a);
  }
  return total;
}

ReplayResult choose_next_model(const std::vector<ModelSpec>& pool, std::size_t incumbent,
                               const std::vector<Action>& episode, const Maze& maze, Color goal,
                               Measure measure, std::shared_ptr<DistanceOracle> oracle) {
  if (pool.empty()) throw Error(ErrorCode::EmptyPool, "no models to choose from");
  if (!oracle) oracle = std::make_shared<DistanceOracle>(maze);
  std::optional<ReplayResult> best;
  // Incumbent first so that strict improvement is required to displace it.
  std::vector<std::size_t> order{incumbent};
  for (std::size_t i = 0; i < pool.size(); ++i)
    if (i != incumbent) order.push_back(i);
  for (std::size_t idx : order) {
    ModelState state(pool[idx], maze, goal, oracle);
    const double total = replay_surprise(state, episode, measure);
    if (!best || total < best->surprise) best = ReplayResult{idx, std::move(state), total};
  }
  return std::move(*best);
}

SwitchingState::SwitchingState(std::vector<ModelSpec> pool, double gamma0, Measure measure,
                               const Maze& maze, Color goal, std::shared_ptr<DistanceOracle> oracle)
    : pool_(std::move(pool)),
      gamma_(gamma0),
      measure_(measure),
      maze_(&maze),
      goal_(goal),
      oracle_(oracle ? std::move(oracle) : std::make_shared<DistanceOracle>(maze)) {
  if (pool_.empty()) throw Error(ErrorCode::EmptyPool, "switching needs at least one model");
  if (!(gamma0 > 0.0)) throw Error(ErrorCode::InvalidConfig, "gamma0 must be positive");
  auto simplest = std::min_element(pool_.begin(), pool_.end(), [](const ModelSpec& a, const ModelSpec& b) {
    return a.space_size() < b.space_size();
  });
  active_ = static_cast<std::size_t>(simplest - pool_.begin());
  model_.emplace(pool_[active_], maze, goal, oracle_);
}

double SwitchingState::step(Action a) {
  const double s = surprise(measure_, model_->predict(), a);
  model_->advance(a);
  episode_.push_back(a);
  accumulated_ += s;
  if (accumulated_ > gamma_) {
    ReplayResult r = choose_next_model(pool_, active_, episode_, *maze_, goal_, measure_, oracle_);
    reevaluations_.push_back({episode_.size(), pool_[active_].kind, pool_[r.pool_index].kind, gamma_});
    active_ = r.pool_index;
    model_.emplace(std::move(r.state));
    accumulated_ = r.surprise;
    gamma_ *= kGammaGrowth;
  }
  return s;
}

std::vector<SwitchEvent> SwitchingState::switch_log() const {
  std::vector<SwitchEvent> out;
  std::copy_if(reevaluations_.begin(), reevaluations_.end(), std::back_inserter(out),
               [](const SwitchEvent& e) { return e.from != e.to; });
  return out;
}

}  // namespace btom
