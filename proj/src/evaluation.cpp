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

#include "jbr/evaluation.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace jbr {
namespace {

void check_profile(const MarkovGame& game, std::span<const BehaviorPolicy> profile) {
  if (profile.size() != static_cast<std::size_t>(game.num_players())) {
    throw std::invalid_argument("profile needs one policy per player");
  }
  for (int p = 0; p < game.num_players(); ++p) {
    const auto& policy = profile[static_cast<std::size_t>(p)];
    if (policy.player() != p ||
        policy.num_infostates() != static_cast<std::size_t>(game.num_infostates(p))) {
      throw std::invalid_argument("policy for player " + std::to_string(p) +
                                  " does not cover the game's infostates");
    }
  }
}

}  // namespace

double joint_action_probability(const MarkovGame& /*game*/, const Node& node, int joint,
                                std::span<const BehaviorPolicy> profile, int excluded_player) {
  double prob = 1.0;
  for (std::size_t k = node.actors.size(); k-- > 0;) {
    const int n = node.num_actions[k];
    const int a = joint % n;
    joint /= n;
    const int p = node.actors[k];
    if (p == excluded_player) continue;
    prob *= profile[static_cast<std::size_t>(p)].probs(node.infostates[k])[static_cast<std::size_t>(a)];
  }
  return prob;
}

EpisodeTrace play_episode(const MarkovGame& game, std::span<const BehaviorPolicy> profile,
                          Rng& rng) {
  if (profile.size() != static_cast<std::size_t>(game.num_players())) {
    throw std::invalid_argument("profile needs one policy per player");
  }
  const auto n = static_cast<std::size_t>(game.num_players());
  EpisodeTrace trace;
  trace.returns.assign(n, 0.0);
  double discount = 1.0;
  NodeId current = game.root();
  while (!game.node(current).is_terminal()) {
    const Node& node = game.node(current);
    EpisodeStep step;
    step.state = current;
    step.actions.assign(n, -1);
    step.infostates.assign(n, -1);
    int edge = 0;
    if (node.is_chance()) {
      edge = rng.sample(node.chance_probs);
      step.chance_outcome = edge;
    } else {
      std::vector<int> actor_actions(node.actors.size());
      for (std::size_t k = 0; k < node.actors.size(); ++k) {
        const auto p = static_cast<std::size_t>(node.actors[k]);
        const int info = node.infostates[k];
        const auto& policy = profile[p];
        if (static_cast<std::size_t>(info) >= policy.num_infostates()) {
          throw std::invalid_argument("policy for player " + std::to_string(p) +
                                      " is missing infostate '" +
                                      game.infostate(static_cast<int>(p), info).key + "'");
        }
        actor_actions[k] = rng.sample(policy.probs(info));
        step.actions[p] = actor_actions[k];
        step.infostates[p] = info;
      }
      edge = game.encode_joint(node, actor_actions);
    }
    step.next = node.children[static_cast<std::size_t>(edge)];
    step.rewards.resize(n);
    for (std::size_t p = 0; p < n; ++p) {
      step.rewards[p] = game.edge_reward(node, edge, static_cast<int>(p));
      trace.returns[p] += discount * step.rewards[p];
    }
    discount *= game.discount();
    current = step.next;
    trace.steps.push_back(std::move(step));
  }
  return trace;
}

EpisodeTrace play_episode(const MarkovGame& game, std::span<const BehaviorPolicy> profile,
                          std::uint64_t seed) {
  Rng rng(seed);
  return play_episode(game, profile, rng);
}

std::vector<double> reach_probabilities(const MarkovGame& game,
                                        std::span<const BehaviorPolicy> profile,
                                        int excluded_player) {
  check_profile(game, profile);
  std::vector<double> reach(game.num_nodes(), 0.0);
  reach[static_cast<std::size_t>(game.root())] = 1.0;
  for (std::size_t id = 0; id < game.num_nodes(); ++id) {
    const double r = reach[id];
    if (r == 0.0) continue;
    const Node& node = game.node(static_cast<NodeId>(id));
    for (int e = 0; e < node.num_edges(); ++e) {
      const double p = node.is_chance()
                           ? node.chance_probs[static_cast<std::size_t>(e)]
                           : joint_action_probability(game, node, e, profile, excluded_player);
      reach[static_cast<std::size_t>(node.children[static_cast<std::size_t>(e)])] = r * p;
    }
  }
  return reach;
}

std::vector<double> expected_payoff(const MarkovGame& game,
                                    std::span<const BehaviorPolicy> profile,
                                    std::size_t node_budget) {
  game.check_budget(node_budget);
  check_profile(game, profile);
  const int n = game.num_players();
  const double gamma = game.discount();
  std::vector<double> values(static_cast<std::size_t>(n), 0.0);
  std::vector<double> reach(game.num_nodes(), 0.0);
  reach[static_cast<std::size_t>(game.root())] = 1.0;
  for (std::size_t id = 0; id < game.num_nodes(); ++id) {
    const double r = reach[id];
    if (r == 0.0) continue;
    const Node& node = game.node(static_cast<NodeId>(id));
    const double weight = gamma == 1.0 ? r : r * std::pow(gamma, node.depth);
    for (int e = 0; e < node.num_edges(); ++e) {
      const double p = node.is_chance() ? node.chance_probs[static_cast<std::size_t>(e)]
                                        : joint_action_probability(game, node, e, profile);
      if (p == 0.0) continue;
      reach[static_cast<std::size_t>(node.children[static_cast<std::size_t>(e)])] = r * p;
      for (int q = 0; q < n; ++q) values[static_cast<std::size_t>(q)] += weight * p * game.edge_reward(node, e, q);
    }
  }
  return values;
}

}  // namespace jbr
