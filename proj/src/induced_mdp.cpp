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

#include "jbr/induced_mdp.hpp"

#include <cmath>
#include <map>
#include <stdexcept>
#include <string>

#include "jbr/evaluation.hpp"

namespace jbr {

void MixedStrategy::validate() const {
  double total = 0.0;
  for (const auto& atom : atoms) {
    if (!(atom.weight >= 0.0)) throw std::invalid_argument("negative mixture weight");
    if (atom.policy.player() != player) throw std::invalid_argument("atom for the wrong player");
    total += atom.weight;
  }
  if (atoms.empty() || std::abs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("mixture weights must sum to one");
  }
}

double InducedMdp::start_value(std::span<const double> state_values) const {
  double value = initial_reward;
  for (const auto& next : initial) {
    if (next.state == kTerminalState) continue;
    value += next.prob * next.discount * state_values[static_cast<std::size_t>(next.state)];
  }
  return value;
}

std::vector<double> own_reach(const MarkovGame& game, const BehaviorPolicy& policy) {
  const int player = policy.player();
  std::vector<double> reach(static_cast<std::size_t>(game.num_infostates(player)), 1.0);
  // A parent infostate is always registered before its children.
  for (int s = 0; s < game.num_infostates(player); ++s) {
    const auto& info = game.infostate(player, s);
    if (info.parent < 0) continue;
    reach[static_cast<std::size_t>(s)] =
        reach[static_cast<std::size_t>(info.parent)] *
        policy.probs(info.parent)[static_cast<std::size_t>(info.parent_action)];
  }
  return reach;
}

BehaviorPolicy to_behavior(const MarkovGame& game, std::span<const BehaviorPolicy> policies,
                           std::span<const double> weights) {
  if (policies.empty() || policies.size() != weights.size()) {
    throw std::invalid_argument("to_behavior needs one weight per policy");
  }
  const int player = policies.front().player();
  const auto num_info = static_cast<std::size_t>(game.num_infostates(player));
  std::vector<std::vector<double>> table(num_info);
  std::vector<double> mass(num_info, 0.0);
  for (std::size_t s = 0; s < num_info; ++s) {
    table[s].assign(static_cast<std::size_t>(game.infostate(player, static_cast<int>(s)).num_actions()),
                    0.0);
  }
  for (std::size_t k = 0; k < policies.size(); ++k) {
    if (weights[k] == 0.0) continue;
    const auto& policy = policies[k];
    if (policy.player() != player) throw std::invalid_argument("mixture mixes players");
    const auto reach = own_reach(game, policy);
    for (std::size_t s = 0; s < num_info; ++s) {
      const double w = weights[k] * reach[s];
      if (w == 0.0) continue;
      mass[s] += w;
      const auto probs = policy.probs(static_cast<int>(s));
      for (std::size_t a = 0; a < probs.size(); ++a) table[s][a] += w * probs[a];
    }
  }
  for (std::size_t s = 0; s < num_info; ++s) {
    auto& row = table[s];
    if (mass[s] > 0.0) {
      for (double& p : row) p /= mass[s];
    } else {
      row.assign(row.size(), 1.0 / static_cast<double>(row.size()));
    }
  }
  return BehaviorPolicy(player, std::move(table));
}

BehaviorPolicy to_behavior(const MixedStrategy& mix, const MarkovGame& game) {
  mix.validate();
  std::vector<BehaviorPolicy> policies;
  std::vector<double> weights;
  for (const auto& atom : mix.atoms) {
    policies.push_back(atom.policy);
    weights.push_back(atom.weight);
  }
  return to_behavior(game, policies, weights);
}

namespace {

struct Accumulator {
  double weight = 0.0;
  double reward = 0.0;
  std::map<int, std::pair<double, double>> next;  // state -> (weight, weight * discount)
};

class Inducer {
 public:
  Inducer(const MarkovGame& game, int player, std::span<const BehaviorPolicy> profile,
          std::span<const double> reach, const std::vector<int>& state_of_infostate)
      : game_(game),
        player_(player),
        profile_(profile),
        reach_(reach),
        state_of_infostate_(state_of_infostate) {}

  // Follows chance and opponent moves from `id` until the player's next
  // decision or termination. `discount` is the factor already accrued since
  // the decision that started the segment.
  void descend(NodeId id, double weight, double reward, double discount, Accumulator& acc) const {
    const Node& node = game_.node(id);
    if (node.is_terminal()) {
      acc.weight += weight;
      acc.reward += weight * reward;
      auto& slot = acc.next[kTerminalState];
      slot.first += weight;
      slot.second += weight * discount;
      return;
    }
    const int slot_index = node.actor_slot(player_);
    if (slot_index >= 0) {
      const int state = state_of_infostate_[static_cast<std::size_t>(node.infostates[static_cast<std::size_t>(slot_index)])];
      acc.weight += weight;
      acc.reward += weight * reward;
      auto& slot = acc.next[state];
      slot.first += weight;
      slot.second += weight * discount;
      return;
    }
    const double gamma = game_.discount();
    for (int e = 0; e < node.num_edges(); ++e) {
      const double p = node.is_chance() ? node.chance_probs[static_cast<std::size_t>(e)]
                                        : joint_action_probability(game_, node, e, profile_);
      if (p == 0.0) continue;
      descend(node.children[static_cast<std::size_t>(e)], weight * p,
              reward + discount * game_.edge_reward(node, e, player_), discount * gamma, acc);
    }
  }

  // Expands the player's own decision at `id` with action `action`.
  void expand(NodeId id, int action, Accumulator& acc) const {
    const Node& node = game_.node(id);
    const int slot = node.actor_slot(player_);
    const double w = reach_[static_cast<std::size_t>(id)];
    const double gamma = game_.discount();
    for (int e = 0; e < node.num_edges(); ++e) {
      if (game_.decode_joint(node, e)[static_cast<std::size_t>(slot)] != action) continue;
      const double p = joint_action_probability(game_, node, e, profile_, player_);
      if (p == 0.0) continue;
      descend(node.children[static_cast<std::size_t>(e)], w * p, game_.edge_reward(node, e, player_),
              gamma, acc);
    }
  }

 private:
  const MarkovGame& game_;
  int player_;
  std::span<const BehaviorPolicy> profile_;
  std::span<const double> reach_;
  const std::vector<int>& state_of_infostate_;
};

std::vector<Successor> to_successors(const Accumulator& acc) {
  std::vector<Successor> out;
  for (const auto& [state, w] : acc.next) {
    out.push_back(Successor{state, w.first / acc.weight, w.second / w.first});
  }
  return out;
}

}  // namespace

InducedMdp induce(const MarkovGame& game, int player, std::span<const BehaviorPolicy> profile,
                  std::size_t node_budget) {
  game.check_budget(node_budget);
  if (player < 0 || player >= game.num_players()) throw std::invalid_argument("bad player index");
  const auto reach = reach_probabilities(game, profile, player);

  InducedMdp out;
  out.player = player;
  const int num_info = game.num_infostates(player);
  out.state_of_infostate.assign(static_cast<std::size_t>(num_info), -1);
  for (int s = 0; s < num_info; ++s) {
    const auto& info = game.infostate(player, s);
    bool reachable = false;
    for (NodeId h : info.members) reachable = reachable || reach[static_cast<std::size_t>(h)] > 0.0;
    if (!reachable) continue;
    out.state_of_infostate[static_cast<std::size_t>(s)] = out.mdp.add_state(info.num_actions());
    out.infostate_of_state.push_back(s);
  }

  const Inducer inducer(game, player, profile, reach, out.state_of_infostate);
  for (int state = 0; state < out.mdp.num_states(); ++state) {
    const auto& info = game.infostate(player, out.infostate_of_state[static_cast<std::size_t>(state)]);
    for (int a = 0; a < info.num_actions(); ++a) {
      Accumulator acc;
      for (NodeId h : info.members) {
        if (reach[static_cast<std::size_t>(h)] > 0.0) inducer.expand(h, a, acc);
      }
      const std::size_t sa = out.mdp.pair(state, a);
      out.mdp.supported[sa] = true;
      out.mdp.reward[sa] = acc.reward / acc.weight;
      out.mdp.successors[sa] = to_successors(acc);
    }
  }

  Accumulator start;
  inducer.descend(game.root(), 1.0, 0.0, 1.0, start);
  out.initial_reward = start.reward;
  out.initial = to_successors(start);
  return out;
}

}  // namespace jbr
