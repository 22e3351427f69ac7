#include <cmath>
#include <numeric>
#include <random>

#include "btom/beliefs.hpp"
#include "btom/simagents.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace btom;
using btom::testing::oracle_posterior;
using btom::testing::random_maze;

namespace {

// Two-exit corridor with distractor exits off to the side.
const char* kCorridor =
    "#######\n"
    "#S...R#\n"
    "#.#.#.#\n"
    "#B#Y#O#\n"
    "#######\n";

double sum(std::span<const double> v) { return std::accumulate(v.begin(), v.end(), 0.0); }

}  // namespace

TEST_CASE("goal belief table enumerates the 24 assignments") {
  const auto& table = goal_belief_table();
  for (int i = 0; i < kNumGoalBeliefs; ++i) CHECK(goal_belief_index(table[static_cast<std::size_t>(i)]) == i);
  const Maze m = parse_maze(kCorridor);
  const int truth = true_goal_belief(m);
  for (Color g : kAllColors) {
    const MentalStateHypothesis h{g, static_cast<std::uint8_t>(truth), WorldBelief::TrueWorld};
    CHECK(believed_goal_cell(m, h) == m.exits()[static_cast<std::size_t>(m.slot_of_color(g))].cell);
  }
}

TEST_CASE("hypothesis_space sizes") {
  CHECK(hypothesis_space().size() == 192);
  CHECK(hypothesis_space({5, WorldBelief::TrueWorld, std::nullopt}).size() == 4);
  CHECK(hypothesis_space({std::nullopt, WorldBelief::TrueWorld, std::nullopt}).size() == 96);
  CHECK(hypothesis_space({5, WorldBelief::Freespace, std::nullopt}).size() == 4);
  const auto full = hypothesis_space();
  for (std::size_t i = 0; i < full.size(); ++i)
    for (std::size_t j = i + 1; j < full.size(); ++j) CHECK_FALSE(full[i] == full[j]);
}

TEST_CASE("ModelConfig validation") {
  CHECK_NOTHROW(ModelConfig{}.validate());
  CHECK_THROWS_AS((ModelConfig{-1.0, 1.0, 3}.validate()), Error);
  CHECK_THROWS_AS((ModelConfig{1.5, 0.0, 3}.validate()), Error);
  CHECK_THROWS_AS((ModelConfig{1.5, 1.1, 3}.validate()), Error);
}

TEST_CASE("boltzmann closed form") {
  // Oracle: 1 / (1 + exp(-1.5)) for utilities -2 and -3 at beta 1.5.
  const auto p = boltzmann(1.5, {-2.0, -3.0, 0.0, 0.0}, 0b0011);
  CHECK(p[0] == doctest::Approx(0.8175744761936437).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.1824255238063563).epsilon(1e-12));
  CHECK(p[2] == 0.0);
  CHECK(p[3] == 0.0);
}

TEST_CASE("action likelihood") {
  const Maze open = parse_maze(
      "S...R\n"
      ".....\n"
      "B...Y\n"
      "....O\n");
  const KnowledgeState k = reveal(open, KnowledgeState(open), open.start(), 3);
  const MentalStateHypothesis h{Color::Y, static_cast<std::uint8_t>(true_goal_belief(open)), WorldBelief::TrueWorld};

  SUBCASE("beta 0 is uniform over the three legal moves of an edge cell") {
    const ModelConfig cfg{0.0, 1.0, 3};
    const Cell edge{2, 0};
    double total = 0.0;
    for (Action a : legal_actions(open, edge)) {
      CHECK(action_likelihood(cfg, open, k, h, edge, a) == doctest::Approx(1.0 / 3.0));
      total += action_likelihood(cfg, open, k, h, edge, a);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("single legal move has probability 1") {
    const Maze m = parse_maze(kCorridor);
    const KnowledgeState km = reveal(m, KnowledgeState(m), m.start(), 3);
    const MentalStateHypothesis hr{Color::R, static_cast<std::uint8_t>(true_goal_belief(m)), WorldBelief::TrueWorld};
    CHECK(action_likelihood({}, m, km, hr, {1, 3}, Action::Up) == 1.0);
  }
  SUBCASE("corridor three steps from the goal") {
    // From (2,1) the R exit at (5,1) is 3 away: Right -> 2, Left -> 4.
    const Maze m = parse_maze(kCorridor);
    const KnowledgeState km = reveal(m, KnowledgeState(m), m.start(), 3);
    const MentalStateHypothesis hr{Color::R, static_cast<std::uint8_t>(true_goal_belief(m)), WorldBelief::TrueWorld};
    CHECK(action_likelihood({}, m, km, hr, {2, 1}, Action::Right) == doctest::Approx(0.9525741268224334).epsilon(1e-12));
    CHECK(action_likelihood({}, m, km, hr, {2, 1}, Action::Left) == doctest::Approx(0.0474258731775666).epsilon(1e-12));
  }
  SUBCASE("moves into walls and Enter are rejected") {
    CHECK_THROWS_AS(action_likelihood({}, open, k, h, {0, 0}, Action::Up), Error);
    CHECK_THROWS_AS(action_likelihood({}, open, k, h, {0, 0}, Action::Enter), Error);
  }
}

TEST_CASE("unreachable believed goal falls back to uniform") {
  // The bottom row is a pocket cut off from every exit.
  const Maze m = parse_maze(
      "S.R.B\n"
      ".....\n"
      "Y...O\n"
      "#####\n"
      "...##\n");
  KnowledgeState k(m);
  k.reveal_all(m);
  const MentalStateHypothesis h{Color::R, static_cast<std::uint8_t>(true_goal_belief(m)), WorldBelief::TrueWorld};
  DistanceOracle oracle(m);
  try {
    action_distribution({}, m, k, h, {1, 4}, oracle);
    FAIL("expected UnreachableGoal");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnreachableGoal);
  }
  const auto p = action_distribution_or_uniform({}, m, k, h, {1, 4}, oracle);
  CHECK(p[static_cast<int>(Action::Left)] == 0.5);
  CHECK(p[static_cast<int>(Action::Right)] == 0.5);
}

TEST_CASE("observation likelihood") {
  const Maze m = parse_maze(kCorridor);
  const int truth = true_goal_belief(m);
  const MentalStateHypothesis good{Color::R, static_cast<std::uint8_t>(truth), WorldBelief::TrueWorld};
  // Swap the colors of slots 0 and 1 (R and B) to get an inconsistent belief.
  ColorAssignment swapped = goal_belief_table()[static_cast<std::size_t>(truth)];
  std::swap(swapped[0], swapped[1]);
  const MentalStateHypothesis bad{Color::R, static_cast<std::uint8_t>(goal_belief_index(swapped)), WorldBelief::TrueWorld};

  const Observation none{{3, 1}, {}};
  CHECK(observation_likelihood(m, none, bad, 1.0) == 1.0);
  const Observation sees_r = observe(m, {4, 1});
  REQUIRE(sees_r.visible_exits.size() == 1);
  CHECK(observation_likelihood(m, sees_r, good, 1.0) == 1.0);
  CHECK(observation_likelihood(m, sees_r, bad, 1.0) == 0.0);
  CHECK(observation_likelihood(m, sees_r, bad, 0.8) == doctest::Approx(0.2));
}

TEST_CASE("posterior_update") {
  const Maze m = parse_maze(kCorridor);
  const ModelConfig cfg{};
  KnowledgeState k = reveal(m, KnowledgeState(m), m.start(), 3);

  SUBCASE("constant likelihood leaves the posterior unchanged") {
    const auto post = JointPosterior::uniform(hypothesis_space());
    const std::vector<double> ones(post.size(), 1.0);
    const auto res = posterior_update(cfg, m, post, ones, Observation{{3, 1}, {}});
    CHECK_FALSE(res.zero_mass_reset);
    for (double w : res.posterior.weights()) CHECK(w == doctest::Approx(1.0 / 192));
  }
  SUBCASE("single hypothesis stays a point mass") {
    const auto post = JointPosterior::uniform(
        hypothesis_space({true_goal_belief(m), WorldBelief::TrueWorld, Color::R}));
    const auto res = posterior_update(cfg, m, k, post, m.start(), Action::Right, observe(m, {2, 1}));
    REQUIRE(res.posterior.size() == 1);
    CHECK(res.posterior.weights()[0] == 1.0);
  }
  SUBCASE("all four exit identities collapse the goal-belief marginal") {
    const auto post = JointPosterior::uniform(hypothesis_space());
    Observation all{{0, 0}, {}};
    for (const Exit& e : m.exits()) all.visible_exits.push_back(e);
    const std::vector<double> ones(post.size(), 1.0);
    const auto res = posterior_update(cfg, m, post, ones, all);
    const auto marg = marginals(res.posterior);
    CHECK(entropy(marg.goal_belief) == 0.0);
    CHECK(marg.goal_belief[static_cast<std::size_t>(true_goal_belief(m))] == doctest::Approx(1.0));
  }
  SUBCASE("zero mass resets to uniform") {
    const int truth = true_goal_belief(m);
    ColorAssignment swapped = goal_belief_table()[static_cast<std::size_t>(truth)];
    std::swap(swapped[0], swapped[1]);
    const auto post = JointPosterior::uniform(
        hypothesis_space({goal_belief_index(swapped), WorldBelief::TrueWorld, std::nullopt}));
    const std::vector<double> ones(post.size(), 1.0);
    const auto res = posterior_update(cfg, m, post, ones, observe(m, {4, 1}));
    CHECK(res.zero_mass_reset);
    for (double w : res.posterior.weights()) CHECK(w == doctest::Approx(0.25));
  }
  SUBCASE("illegal action is rejected") {
    const auto post = JointPosterior::uniform(hypothesis_space());
    CHECK_THROWS_AS(posterior_update(cfg, m, k, post, m.start(), Action::Up, observe(m, m.start())), Error);
  }
}

TEST_CASE("marginals and entropy") {
  SUBCASE("uniform over the full space") {
    const auto post = JointPosterior::uniform(hypothesis_space());
    const auto marg = marginals(post);
    for (double v : marg.goal) CHECK(v == doctest::Approx(0.25));
    for (double v : marg.goal_belief) CHECK(v == doctest::Approx(1.0 / 24));
    for (double v : marg.world) CHECK(v == doctest::Approx(0.5));
    // Oracle: (ln 4 + ln 24 + ln 2) / 3.
    CHECK(averaged_entropy(post) == doctest::Approx(1.752498457342594).epsilon(1e-12));
  }
  SUBCASE("clamped beliefs contribute nothing") {
    const auto post = JointPosterior::uniform(hypothesis_space({3, WorldBelief::TrueWorld, std::nullopt}));
    CHECK(averaged_entropy(post) == doctest::Approx(0.46209812037329684).epsilon(1e-12));
  }
  SUBCASE("point mass") {
    const auto post = JointPosterior::uniform(hypothesis_space({3, WorldBelief::TrueWorld, Color::B}));
    const auto marg = marginals(post);
    CHECK(marg.goal[static_cast<std::size_t>(Color::B)] == 1.0);
    CHECK(marg.goal_belief[3] == 1.0);
    CHECK(marg.world[0] == 1.0);
    CHECK(averaged_entropy(post) == 0.0);
  }
  SUBCASE("arbitrary joint matches brute-force summation") {
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto support = hypothesis_space();
    std::vector<double> w(support.size());
    for (double& v : w) v = u(rng);
    const JointPosterior post(support, w);
    const auto marg = marginals(post);
    const double total = sum(w);
    for (Color g : kAllColors) {
      double want = 0.0;
      for (int bg = 0; bg < 24; ++bg)
        for (int bw = 0; bw < 2; ++bw) want += w[static_cast<std::size_t>((static_cast<int>(g) * 24 + bg) * 2 + bw)];
      CHECK(marg.goal[static_cast<std::size_t>(g)] == doctest::Approx(want / total).epsilon(1e-12));
    }
    for (int bg = 0; bg < 24; ++bg) {
      double want = 0.0;
      for (int g = 0; g < 4; ++g)
        for (int bw = 0; bw < 2; ++bw) want += w[static_cast<std::size_t>((g * 24 + bg) * 2 + bw)];
      CHECK(marg.goal_belief[static_cast<std::size_t>(bg)] == doctest::Approx(want / total).epsilon(1e-12));
    }
    double fs = 0.0;
    for (std::size_t i = 1; i < w.size(); i += 2) fs += w[i];
    CHECK(marg.world[1] == doctest::Approx(fs / total).epsilon(1e-12));
    CHECK(sum(marg.goal) == doctest::Approx(1.0));
    CHECK(sum(marg.goal_belief) == doctest::Approx(1.0));
    CHECK(sum(marg.world) == doctest::Approx(1.0));
  }
}

TEST_CASE("sequential updates match the one-pass product") {
  std::mt19937_64 rng(99);
  const ModelConfig cfg{};
  for (int t = 0; t < 10; ++t) {
    const Maze m = random_maze(rng, 8, 6, 0.2);
    const Trajectory traj = generate_nu(m, kAllColors[static_cast<std::size_t>(t % 4)], 1.0, 1000 + t);
    const auto all_moves = traj.moves();
    const std::vector<Action> moves(all_moves.begin(),
                                    all_moves.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(all_moves.size(), 12)));
    const auto support = hypothesis_space();

    auto post = JointPosterior::uniform(support);
    KnowledgeState k(m);
    Cell pos = m.start();
    k.reveal_from(m, pos, cfg.reveal_radius);
    post = posterior_update(cfg, m, post, std::vector<double>(post.size(), 1.0), observe(m, pos)).posterior;
    for (std::size_t i = 0; i < moves.size(); ++i) {
      const Cell next = step(pos, moves[i]);
      KnowledgeState after = k;
      after.reveal_from(m, next, cfg.reveal_radius);
      const auto res = posterior_update(cfg, m, k, post, pos, moves[i], observe(m, next));
      REQUIRE_FALSE(res.zero_mass_reset);
      post = res.posterior;
      pos = next;
      k = after;

      const std::vector<Action> prefix(moves.begin(), moves.begin() + static_cast<std::ptrdiff_t>(i + 1));
      const auto want = oracle_posterior(m, cfg, support, prefix);
      for (std::size_t j = 0; j < want.size(); ++j)
        CHECK(post.weights()[j] == doctest::Approx(want[j]).epsilon(1e-9));
    }
  }
}
