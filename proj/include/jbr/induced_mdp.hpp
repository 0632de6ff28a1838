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

#ifndef JBR_INDUCED_MDP_HPP
#define JBR_INDUCED_MDP_HPP

#include <span>
#include <vector>

#include "jbr/game.hpp"
#include "jbr/mdp.hpp"
#include "jbr/policy.hpp"

namespace jbr {

// Mixture over a restricted policy set for one player.
struct MixedStrategy {
  struct Atom {
    BehaviorPolicy policy;
    double weight = 0.0;
  };
  int player = 0;
  std::vector<Atom> atoms;

  // Throws std::invalid_argument unless weights are nonnegative and sum to one.
  void validate() const;
};

// Player-local decision-point MDP with the opponents and chance absorbed.
// States are the player's perfect-recall infostates that the opponents'
// behavior can reach; a successor is the next own infostate or termination.
struct InducedMdp {
  int player = 0;
  TabularMdp mdp;
  std::vector<int> infostate_of_state;
  std::vector<int> state_of_infostate;  // -1 when pruned
  std::vector<Successor> initial;       // first own decision (or termination)
  double initial_reward = 0.0;          // expected reward before the first decision

  // Expected return when values per state are `state_values`.
  double start_value(std::span<const double> state_values) const;
};

// Behavior policy realization-equivalent to playing the mixture of
// `policies` with `weights`. Infostates that no atom reaches get the uniform
// distribution.
BehaviorPolicy to_behavior(const MarkovGame& game, std::span<const BehaviorPolicy> policies,
                           std::span<const double> weights);
BehaviorPolicy to_behavior(const MixedStrategy& mix, const MarkovGame& game);

// Own-action realization probability of every infostate of the policy's
// player, computed along the perfect-recall parent chain.
std::vector<double> own_reach(const MarkovGame& game, const BehaviorPolicy& policy);

// Marginalizes the opponents' actions into dynamics and rewards for
// `player`. `profile[player]` is ignored.
InducedMdp induce(const MarkovGame& game, int player, std::span<const BehaviorPolicy> profile,
                  std::size_t node_budget = kDefaultNodeBudget);

}  // namespace jbr

#endif  // JBR_INDUCED_MDP_HPP
