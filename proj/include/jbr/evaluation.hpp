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

#ifndef JBR_EVALUATION_HPP
#define JBR_EVALUATION_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "jbr/game.hpp"
#include "jbr/policy.hpp"
#include "jbr/rng.hpp"

namespace jbr {

struct EpisodeStep {
  NodeId state = kNoNode;
  NodeId next = kNoNode;
  int chance_outcome = -1;            // chance steps only
  std::vector<int> actions;           // per player, -1 when not acting
  std::vector<int> infostates;        // per player, -1 when not acting
  std::vector<double> rewards;        // per player
};

struct EpisodeTrace {
  std::vector<EpisodeStep> steps;
  std::vector<double> returns;        // discounted, per player
};

// Samples one episode from the root. Throws std::invalid_argument when the
// profile does not cover an encountered infostate.
EpisodeTrace play_episode(const MarkovGame& game, std::span<const BehaviorPolicy> profile,
                          Rng& rng);
EpisodeTrace play_episode(const MarkovGame& game, std::span<const BehaviorPolicy> profile,
                          std::uint64_t seed);

// Exact expected discounted return per player, by one forward pass over the
// tree weighted with chance and policy probabilities.
std::vector<double> expected_payoff(const MarkovGame& game,
                                    std::span<const BehaviorPolicy> profile,
                                    std::size_t node_budget = kDefaultNodeBudget);

// Probability of reaching every node under the profile, with the actions of
// `excluded_player` (if >= 0) counted as probability one.
std::vector<double> reach_probabilities(const MarkovGame& game,
                                        std::span<const BehaviorPolicy> profile,
                                        int excluded_player = -1);

// Probability of `joint` at a decision node under the profile, skipping the
// factor of `excluded_player`.
double joint_action_probability(const MarkovGame& game, const Node& node, int joint,
                                std::span<const BehaviorPolicy> profile, int excluded_player = -1);

}  // namespace jbr

#endif  // JBR_EVALUATION_HPP
