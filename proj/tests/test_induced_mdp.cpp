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

#include "jbr/evaluation.hpp"
#include "jbr/games.hpp"
#include "jbr/induced_mdp.hpp"
#include "jbr/oracles.hpp"
#include "test_support.hpp"

namespace jbr {
namespace {

using testing::evaluate_policy;
using testing::random_profile;

// Rows of `policy` laid out per induced-MDP state.
std::vector<std::vector<double>> rows_for(const InducedMdp& induced, const BehaviorPolicy& policy) {
  std::vector<std::vector<double>> rows;
  for (int info : induced.infostate_of_state) {
    const auto p = policy.probs(info);
    rows.emplace_back(p.begin(), p.end());
  }
  return rows;
}

double policy_value(const InducedMdp& induced, const BehaviorPolicy& policy) {
  const auto v = evaluate_policy(induced.mdp, rows_for(induced, policy));
  return induced.start_value(v);
}

TEST(ToBehavior, SingleAtomIsIdentity) {
  const auto game = build_kuhn();
  const auto pi = random_profile(game, 1)[0];
  const std::vector<BehaviorPolicy> atoms{pi};
  const std::vector<double> w{1.0};
  const auto out = to_behavior(game, atoms, w);
  for (int s = 0; s < game.num_infostates(0); ++s) {
    for (int a = 0; a < 2; ++a) EXPECT_NEAR(out.probs(s)[a], pi.probs(s)[a], 1e-15);
  }
}

TEST(ToBehavior, IdenticalAtomsCollapse) {
  const auto game = build_leduc();
  const auto pi = random_profile(game, 2)[1];
  const std::vector<BehaviorPolicy> atoms{pi, pi};
  const std::vector<double> w{0.3, 0.7};
  const auto out = to_behavior(game, atoms, w);
  EXPECT_LE(max_l1_distance(out, pi), 1e-12);
}

TEST(ToBehavior, BetCheckMixtureIsRealizationEquivalent) {
  const auto game = build_kuhn();
  std::vector<int> bet(static_cast<std::size_t>(game.num_infostates(0)), 1);
  std::vector<int> check(bet.size(), 0);
  const std::vector<BehaviorPolicy> atoms{BehaviorPolicy::pure(game, 0, bet),
                                          BehaviorPolicy::pure(game, 0, check)};
  const std::vector<double> w{0.5, 0.5};
  const auto mixed = to_behavior(game, atoms, w);
  for (const char* root : {"J:", "Q:", "K:"}) {
    const int s = *game.find_infostate(0, root);
    EXPECT_NEAR(mixed.probs(s)[0], 0.5, 1e-12);
    EXPECT_NEAR(mixed.probs(s)[1], 0.5, 1e-12);
  }
  // Only the always-check atom reaches "X:pb", so it keeps that atom's row.
  EXPECT_NEAR(mixed.probs(*game.find_infostate(0, "Q:pb"))[0], 1.0, 1e-12);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    auto profile = random_profile(game, 100 + seed);
    double weighted = 0.0;
    for (std::size_t k = 0; k < atoms.size(); ++k) {
      profile[0] = atoms[k];
      weighted += w[k] * expected_payoff(game, profile)[0];
    }
    profile[0] = mixed;
    EXPECT_NEAR(expected_payoff(game, profile)[0], weighted, 1e-9);
  }
}

TEST(ToBehavior, RandomMixturesMatchOnLeduc) {
  const auto game = build_leduc();
  Rng rng(8);
  std::vector<BehaviorPolicy> atoms;
  for (int k = 0; k < 3; ++k) atoms.push_back(BehaviorPolicy::random(game, 1, rng));
  const std::vector<double> w{0.2, 0.5, 0.3};
  auto profile = random_profile(game, 9);
  double weighted = 0.0;
  for (std::size_t k = 0; k < atoms.size(); ++k) {
    profile[1] = atoms[k];
    weighted += w[k] * expected_payoff(game, profile)[1];
  }
  profile[1] = to_behavior(game, atoms, w);
  EXPECT_NEAR(expected_payoff(game, profile)[1], weighted, 1e-9);
}

TEST(ToBehavior, UnreachedInfostatesAreUniform) {
  const auto game = build_kuhn();
  std::vector<int> bet(static_cast<std::size_t>(game.num_infostates(0)), 1);
  const std::vector<BehaviorPolicy> atoms{BehaviorPolicy::pure(game, 0, bet)};
  const std::vector<double> w{1.0};
  const auto out = to_behavior(game, atoms, w);
  const int s = *game.find_infostate(0, "K:pb");
  EXPECT_DOUBLE_EQ(out.probs(s)[0], 0.5);
  EXPECT_DOUBLE_EQ(out.probs(s)[1], 0.5);
}

TEST(MixedStrategy, ValidateRejectsBadWeights) {
  const auto game = build_kuhn();
  MixedStrategy mix{0, {{BehaviorPolicy::uniform(game, 0), 0.6}, {BehaviorPolicy::uniform(game, 0), 0.3}}};
  EXPECT_THROW(mix.validate(), std::invalid_argument);
  mix.atoms[1].weight = 0.4;
  EXPECT_NO_THROW(mix.validate());
  mix.atoms[1].weight = -0.4;
  mix.atoms[0].weight = 1.4;
  EXPECT_THROW(mix.validate(), std::invalid_argument);
}

TEST(Induce, MatrixPureColumnGivesThatColumn) {
  const GameId id = GameId::parse("matrix:4:3x2");
  const auto game = build_game(id);
  const auto m = random_matrix(id.seed, 3, 2);
  for (int j = 0; j < 2; ++j) {
    const Profile profile{BehaviorPolicy::uniform(game, 0),
                          BehaviorPolicy::pure(game, 1, std::vector<int>{j})};
    const auto induced = induce(game, 0, profile);
    ASSERT_EQ(induced.mdp.num_states(), 1);
    for (int a = 0; a < 3; ++a) {
      EXPECT_NEAR(induced.mdp.reward[induced.mdp.pair(0, a)], m[static_cast<std::size_t>(a)][static_cast<std::size_t>(j)], 1e-15);
    }
  }
}

TEST(Induce, MatrixUniformColumnGivesRowMeans) {
  const GameId id = GameId::parse("matrix:5:2x3");
  const auto game = build_game(id);
  const auto m = random_matrix(id.seed, 2, 3);
  const auto induced = induce(game, 0, uniform_profile(game));
  for (int a = 0; a < 2; ++a) {
    const auto& row = m[static_cast<std::size_t>(a)];
    EXPECT_NEAR(induced.mdp.reward[induced.mdp.pair(0, a)], (row[0] + row[1] + row[2]) / 3.0, 1e-12);
  }
  // Column player sees the negated column means.
  const auto col = induce(game, 1, uniform_profile(game));
  for (int b = 0; b < 3; ++b) {
    EXPECT_NEAR(col.mdp.reward[col.mdp.pair(0, b)], -(m[0][static_cast<std::size_t>(b)] + m[1][static_cast<std::size_t>(b)]) / 2.0, 1e-12);
  }
}

TEST(Induce, RowsAreDistributions) {
  for (const char* id : {"kuhn", "leduc"}) {
    const auto game = build_game(GameId::parse(id));
    const auto profile = random_profile(game, 3);
    for (int p = 0; p < 2; ++p) {
      const auto induced = induce(game, p, profile);
      EXPECT_NO_THROW(induced.mdp.validate(1e-9));
      for (std::size_t k = 0; k < induced.mdp.num_pairs(); ++k) EXPECT_TRUE(induced.mdp.supported[k]);
    }
  }
}

TEST(Induce, OptimalValueEqualsExactBestResponse) {
  const auto game = build_kuhn();
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto profile = random_profile(game, seed);
    for (int p = 0; p < 2; ++p) {
      const auto induced = induce(game, p, profile);
      const auto q = value_iteration(induced.mdp);
      EXPECT_NEAR(induced.start_value(q.value), exact_best_response(game, p, profile).value, 1e-9);
    }
  }
}

TEST(Induce, FixedPolicyValueMatchesTreeEvaluation) {
  const auto game = build_leduc();
  const auto profile = random_profile(game, 21);
  const auto u = expected_payoff(game, profile);
  for (int p = 0; p < 2; ++p) {
    const auto induced = induce(game, p, profile);
    EXPECT_NEAR(policy_value(induced, profile[static_cast<std::size_t>(p)]), u[static_cast<std::size_t>(p)], 1e-9);
  }
}

// Blend each opponent row pointwise.
BehaviorPolicy blend(const BehaviorPolicy& a, const BehaviorPolicy& b, double alpha) {
  auto out = a;
  for (std::size_t s = 0; s < a.num_infostates(); ++s) {
    auto& row = out.mutable_probs(static_cast<int>(s));
    for (std::size_t k = 0; k < row.size(); ++k) {
      row[k] = alpha * a.probs(static_cast<int>(s))[k] + (1.0 - alpha) * b.probs(static_cast<int>(s))[k];
    }
  }
  return out;
}

TEST(Induce, MarginalizationIsLinearOnMatrixGames) {
  const auto game = build_game(GameId::parse("matrix:9:3x3"));
  const auto nu = random_profile(game, 1);
  const auto mu = random_profile(game, 2);
  const auto a = induce(game, 0, nu);
  const auto b = induce(game, 0, mu);
  for (double alpha : {0.0, 0.25, 0.5, 1.0}) {
    const Profile mix{nu[0], blend(nu[1], mu[1], alpha)};
    const auto c = induce(game, 0, mix);
    for (std::size_t k = 0; k < c.mdp.num_pairs(); ++k) {
      EXPECT_NEAR(c.mdp.reward[k], alpha * a.mdp.reward[k] + (1 - alpha) * b.mdp.reward[k], 1e-9);
    }
  }
}

// In Kuhn the opponent of player 0 acts once per deal, so a pointwise blend
// of its rows is the same as mixing the two policies. Conditional dynamics at
// later decision points are Bayesian and not linear, so the check is on the
// value of fixed policies and on the first-decision dynamics.
TEST(Induce, MarginalizationIsLinearInValueOnKuhn) {
  const auto game = build_kuhn();
  const auto nu = random_profile(game, 4);
  const auto mu = random_profile(game, 5);
  const auto a = induce(game, 0, nu);
  const auto b = induce(game, 0, mu);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto pi = random_profile(game, 50 + seed)[0];
    for (double alpha : {0.0, 0.25, 0.5, 1.0}) {
      const Profile mix{pi, blend(nu[1], mu[1], alpha)};
      const auto c = induce(game, 0, mix);
      EXPECT_NEAR(policy_value(c, pi), alpha * policy_value(a, pi) + (1 - alpha) * policy_value(b, pi), 1e-9);
      for (const char* root : {"J:", "Q:", "K:"}) {
        const int info = *game.find_infostate(0, root);
        for (int act = 0; act < 2; ++act) {
          const auto k = c.mdp.pair(c.state_of_infostate[static_cast<std::size_t>(info)], act);
          const auto ka = a.mdp.pair(a.state_of_infostate[static_cast<std::size_t>(info)], act);
          const auto kb = b.mdp.pair(b.state_of_infostate[static_cast<std::size_t>(info)], act);
          EXPECT_NEAR(c.mdp.reward[k], alpha * a.mdp.reward[ka] + (1 - alpha) * b.mdp.reward[kb], 1e-9);
        }
      }
    }
  }
}

TEST(Induce, PrunesInfostatesTheOpponentNeverReaches) {
  const auto game = build_kuhn();
  auto profile = uniform_profile(game);
  // Player 1 never bets after a check, so player 0 never faces "X:pb".
  for (const char* key : {"J:p", "Q:p", "K:p"}) {
    profile[1].mutable_probs(*game.find_infostate(1, key)) = {1.0, 0.0};
  }
  const auto induced = induce(game, 0, profile);
  EXPECT_EQ(induced.mdp.num_states(), 3);
  EXPECT_EQ(induced.state_of_infostate[static_cast<std::size_t>(*game.find_infostate(0, "J:pb"))], -1);
}

}  // namespace
}  // namespace jbr
