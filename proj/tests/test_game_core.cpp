// Copyright 2026 The psro-jbr Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "jbr/evaluation.hpp"
#include "jbr/games.hpp"
#include "jbr/policy.hpp"
#include "test_support.hpp"

namespace jbr {
namespace {

using testing::kuhn_value;
using testing::leduc_value;
using testing::random_profile;

TEST(GameId, ParsesAndPrintsAllKinds) {
  EXPECT_EQ(GameId::parse("kuhn").kind, GameKind::kKuhn);
  EXPECT_EQ(GameId::parse("leduc").kind, GameKind::kLeduc);
  const auto m = GameId::parse("matrix:7:3x2");
  EXPECT_EQ(m.kind, GameKind::kMatrix);
  EXPECT_EQ(m.seed, 7u);
  EXPECT_EQ(m.rows, 3);
  EXPECT_EQ(m.cols, 2);
  EXPECT_EQ(m.to_string(), "matrix:7:3x2");
  for (const char* bad : {"", "poker", "matrix:", "matrix:1:0x2", "matrix:x:2x2", "matrix:1:2y2"}) {
    EXPECT_THROW(GameId::parse(bad), std::invalid_argument) << bad;
  }
}

TEST(Kuhn, InfostateCountsFromTreeWalk) {
  const auto game = build_kuhn();
  // Walk the tree and collect the distinct infostate keys per player.
  std::array<std::set<std::string>, 2> keys;
  for (const auto& node : game.nodes()) {
    for (std::size_t k = 0; k < node.actors.size(); ++k) {
      keys[static_cast<std::size_t>(node.actors[k])].insert(
          game.infostate(node.actors[k], node.infostates[k]).key);
    }
  }
  EXPECT_EQ(keys[0].size(), 6u);
  EXPECT_EQ(keys[1].size(), 6u);
  EXPECT_EQ(game.num_infostates(0) + game.num_infostates(1), 12);
  EXPECT_EQ(game.num_nodes(), 58u);
}

TEST(Kuhn, PayoffBoundsAndDiscount) {
  const auto game = build_kuhn();
  EXPECT_DOUBLE_EQ(game.payoff_bounds().lo, -2.0);
  EXPECT_DOUBLE_EQ(game.payoff_bounds().hi, 2.0);
  EXPECT_DOUBLE_EQ(game.payoff_bounds().range(), 4.0);
  EXPECT_DOUBLE_EQ(game.discount(), 1.0);
  EXPECT_TRUE(game.zero_sum());
}

TEST(Kuhn, UniformValueMatchesRuleEnumeration) {
  const auto game = build_kuhn();
  const auto profile = uniform_profile(game);
  const auto u = expected_payoff(game, profile);
  EXPECT_NEAR(u[0], kuhn_value(game, profile), 1e-12);
  EXPECT_NEAR(u[0] + u[1], 0.0, 1e-12);
}

TEST(Kuhn, RandomProfilesMatchRuleEnumeration) {
  const auto game = build_kuhn();
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto profile = random_profile(game, seed);
    const auto u = expected_payoff(game, profile);
    EXPECT_NEAR(u[0], kuhn_value(game, profile), 1e-12);
    EXPECT_NEAR(u[0] + u[1], 0.0, 1e-9);
  }
}

TEST(Kuhn, KnownEquilibriumValue) {
  const auto game = build_kuhn();
  const auto u = expected_payoff(game, testing::kuhn_nash(game));
  EXPECT_NEAR(u[0], -1.0 / 18.0, 1e-12);
}

TEST(Kuhn, AlwaysPassShowdownsPayByCard) {
  const auto game = build_kuhn();
  std::vector<int> pass0(static_cast<std::size_t>(game.num_infostates(0)), 0);
  std::vector<int> pass1(static_cast<std::size_t>(game.num_infostates(1)), 0);
  const Profile profile{BehaviorPolicy::pure(game, 0, pass0), BehaviorPolicy::pure(game, 1, pass1)};
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    const auto trace = play_episode(game, profile, seed);
    ASSERT_TRUE(game.node(trace.steps.back().next).is_terminal());
    // Cards are the first two chance outcomes, ranks J < Q < K.
    const int c0 = trace.steps[0].chance_outcome;
    int c1 = trace.steps[1].chance_outcome;
    if (c1 >= c0) ++c1;
    EXPECT_DOUBLE_EQ(trace.returns[0], c0 > c1 ? 1.0 : -1.0);
    EXPECT_DOUBLE_EQ(trace.returns[1], -trace.returns[0]);
  }
}

TEST(Leduc, RulesAndBounds) {
  const auto game = build_leduc();
  EXPECT_DOUBLE_EQ(game.payoff_bounds().lo, -13.0);
  EXPECT_DOUBLE_EQ(game.payoff_bounds().hi, 13.0);
  int max_raises_seen = 0;
  for (const auto& node : game.nodes()) {
    if (!node.is_decision()) continue;
    const auto& info = game.infostate(node.actors[0], node.infostates[0]);
    // Fold only when facing a bet, so the action count is 2 or 3 and every
    // first action of a round offers call/raise.
    EXPECT_GE(info.num_actions(), 1);
    EXPECT_LE(info.num_actions(), 3);
    const auto slash = info.key.find('/');
    const auto colon = info.key.find(':');
    const std::string round0 = info.key.substr(colon + 1, slash - colon - 1);
    const std::string round1 = info.key.substr(slash + 1);
    const std::string& current = round1.empty() && info.key.find('|') == std::string::npos ? round0 : round1;
    const int raises = static_cast<int>(std::count(current.begin(), current.end(), 'r'));
    max_raises_seen = std::max(max_raises_seen, raises);
    EXPECT_EQ(info.action_labels.back() == "r", raises < 2) << info.key;
    EXPECT_EQ(info.action_labels.front() == "f", !current.empty() && current.back() == 'r')
        << info.key;
  }
  EXPECT_EQ(max_raises_seen, 2);
}

TEST(Leduc, ProfilesMatchRuleEnumeration) {
  const auto game = build_leduc();
  for (std::uint64_t seed = 0; seed < 3; ++seed) {
    const auto profile = random_profile(game, seed);
    const auto u = expected_payoff(game, profile);
    EXPECT_NEAR(u[0], leduc_value(game, profile), 1e-10);
    EXPECT_NEAR(u[0] + u[1], 0.0, 1e-9);
  }
  const auto uniform = uniform_profile(game);
  EXPECT_NEAR(expected_payoff(game, uniform)[0], leduc_value(game, uniform), 1e-10);
}

TEST(Leduc, NodeBudgetIsEnforced) {
  EXPECT_THROW(build_game(GameId::parse("leduc"), 100), NodeBudgetExceeded);
  const auto game = build_leduc();
  EXPECT_THROW(expected_payoff(game, uniform_profile(game), 100), NodeBudgetExceeded);
}

TEST(Matrix, SingleSimultaneousDecision) {
  const auto game = build_game(GameId::parse("matrix:0:2x2"));
  EXPECT_EQ(game.num_infostates(0), 1);
  EXPECT_EQ(game.num_infostates(1), 1);
  EXPECT_EQ(game.infostate(0, 0).num_actions(), 2);
  EXPECT_EQ(game.infostate(1, 0).num_actions(), 2);
  const auto m = random_matrix(0, 2, 2);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const Profile profile{BehaviorPolicy::pure(game, 0, std::vector<int>{i}),
                            BehaviorPolicy::pure(game, 1, std::vector<int>{j})};
      const auto u = expected_payoff(game, profile);
      EXPECT_DOUBLE_EQ(u[0], m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      EXPECT_DOUBLE_EQ(u[1], -m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
      const auto trace = play_episode(game, profile, 3);
      ASSERT_EQ(trace.steps.size(), 1u);
      EXPECT_EQ(trace.steps[0].actions, (std::vector<int>{i, j}));
      EXPECT_TRUE(game.node(trace.steps[0].next).is_terminal());
    }
  }
}

TEST(Matrix, RandomEntriesWithinBounds) {
  const auto m = random_matrix(11, 4, 5);
  for (const auto& row : m) {
    for (double v : row) {
      EXPECT_GE(v, -1.0);
      EXPECT_LE(v, 1.0);
    }
  }
  EXPECT_EQ(random_matrix(11, 4, 5), m);
}

TEST(Episodes, FixedSeedIsDeterministic) {
  for (const char* id : {"kuhn", "leduc", "matrix:3:3x3"}) {
    const auto game = build_game(GameId::parse(id));
    const auto profile = random_profile(game, 5);
    const auto a = play_episode(game, profile, 42);
    const auto b = play_episode(game, profile, 42);
    ASSERT_EQ(a.steps.size(), b.steps.size());
    for (std::size_t k = 0; k < a.steps.size(); ++k) {
      EXPECT_EQ(a.steps[k].state, b.steps[k].state);
      EXPECT_EQ(a.steps[k].actions, b.steps[k].actions);
      EXPECT_EQ(a.steps[k].rewards, b.steps[k].rewards);
    }
    EXPECT_EQ(a.returns, b.returns);
    EXPECT_TRUE(game.node(a.steps.back().next).is_terminal());
  }
}

TEST(Episodes, MissingPolicyRowIsRejected) {
  const auto game = build_kuhn();
  Profile profile = uniform_profile(game);
  profile[1] = BehaviorPolicy(1, {});
  EXPECT_THROW(play_episode(game, profile, 0), std::invalid_argument);
}

// Monte-Carlo mean of 50,000 episodes within three standard errors.
void expect_monte_carlo_agrees(const MarkovGame& game, const Profile& profile) {
  const auto exact = expected_payoff(game, profile);
  Rng rng(2024);
  const int n = 50'000;
  double sum = 0.0, sum_sq = 0.0;
  for (int k = 0; k < n; ++k) {
    const double r = play_episode(game, profile, rng).returns[0];
    sum += r;
    sum_sq += r * r;
  }
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  EXPECT_LE(std::abs(mean - exact[0]), 3.0 * se) << "mean " << mean << " exact " << exact[0];
}

TEST(Episodes, MonteCarloMatchesExactKuhn) {
  const auto game = build_kuhn();
  expect_monte_carlo_agrees(game, random_profile(game, 9));
}

TEST(Episodes, MonteCarloMatchesExactLeduc) {
  const auto game = build_leduc();
  expect_monte_carlo_agrees(game, random_profile(game, 9));
}

TEST(Builder, RejectsChanceRowsThatDoNotSumToOne) {
  GameBuilder b(GameId{}, 2, 1.0, PayoffBounds{-1, 1}, true);
  const NodeId root = b.add_chance("", {0.5, 0.4});
  b.link(root, 0, b.add_terminal("a"));
  b.link(root, 1, b.add_terminal("b"));
  EXPECT_THROW(std::move(b).finish(), std::logic_error);
}

TEST(Builder, RejectsNonZeroSumRewards) {
  GameBuilder b(GameId{}, 2, 1.0, PayoffBounds{-1, 1}, true);
  const NodeId root = b.add_decision("", {{0, "x", {"a"}}});
  b.link(root, 0, b.add_terminal("a"), {1.0, -0.5});
  EXPECT_THROW(std::move(b).finish(), std::logic_error);
}

TEST(Builder, RejectsUnlinkedEdges) {
  GameBuilder b(GameId{}, 2, 1.0, PayoffBounds{-1, 1}, true);
  const NodeId root = b.add_decision("", {{0, "x", {"a", "b"}}});
  b.link(root, 0, b.add_terminal("a"));
  EXPECT_THROW(std::move(b).finish(), std::logic_error);
}

TEST(Builder, RejectsForgettingOwnAction) {
  // Player 0 acts, then reaches the same key after either action.
  GameBuilder b(GameId{}, 2, 1.0, PayoffBounds{-1, 1}, true);
  const NodeId root = b.add_decision("", {{0, "root", {"a", "b"}}});
  for (int a = 0; a < 2; ++a) {
    const NodeId again = b.add_decision(std::to_string(a), {{0, "forgot", {"x"}}});
    b.link(root, a, again);
    b.link(again, 0, b.add_terminal(std::to_string(a) + "x"));
  }
  EXPECT_THROW(std::move(b).finish(), std::logic_error);
}

TEST(Policy, ValidateRejectsBadRows) {
  const auto game = build_kuhn();
  auto policy = BehaviorPolicy::uniform(game, 0);
  EXPECT_NO_THROW(policy.validate(game));
  policy.mutable_probs(0) = {0.7, 0.7};
  EXPECT_THROW(policy.validate(game), std::invalid_argument);
  policy.mutable_probs(0) = {1.2, -0.2};
  EXPECT_THROW(policy.validate(game), std::invalid_argument);
  policy.mutable_probs(0) = {1.0};
  EXPECT_THROW(policy.validate(game), std::invalid_argument);
}

TEST(Policy, RandomPoliciesAreValidAndSeeded) {
  const auto game = build_leduc();
  Rng a(3), b(3);
  const auto p = BehaviorPolicy::random(game, 1, a);
  EXPECT_NO_THROW(p.validate(game));
  EXPECT_EQ(p, BehaviorPolicy::random(game, 1, b));
  EXPECT_EQ(p.hash(), BehaviorPolicy::random(game, 1, *std::make_unique<Rng>(3)).hash());
}

}  // namespace
}  // namespace jbr
