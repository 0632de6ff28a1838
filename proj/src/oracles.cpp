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

#include "jbr/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>

#include "jbr/evaluation.hpp"

namespace jbr {

std::string to_string(OracleKind kind) {
  switch (kind) {
    case OracleKind::kExact:
      return "exact";
    case OracleKind::kIndependent:
      return "ibr";
    case OracleKind::kNaiveJbr:
      return "jbr";
    case OracleKind::kSpiJbr:
      return "jbr-spi";
  }
  return "?";
}

namespace {

// Value of a state given its row of action values.
using Backup = std::function<double(int state, std::span<const double> q_row)>;

double q_value(const TabularMdp& mdp, std::size_t sa, std::span<const double> value) {
  double q = mdp.reward[sa];
  for (const auto& next : mdp.successors[sa]) {
    if (next.state == kTerminalState) continue;
    q += next.prob * next.discount * value[static_cast<std::size_t>(next.state)];
  }
  return q;
}

// Reverse topological order of the supported successor graph, or nullopt if
// it has a cycle.
std::optional<std::vector<int>> backward_order(const TabularMdp& mdp) {
  const int n = mdp.num_states();
  std::vector<int> indegree(static_cast<std::size_t>(n), 0);
  auto for_each_next = [&](int s, auto&& fn) {
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      const std::size_t sa = mdp.pair(s, a);
      if (!mdp.supported[sa]) continue;
      for (const auto& next : mdp.successors[sa]) {
        if (next.state != kTerminalState) fn(next.state);
      }
    }
  };
  for (int s = 0; s < n; ++s) for_each_next(s, [&](int t) { ++indegree[static_cast<std::size_t>(t)]; });
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  for (int s = 0; s < n; ++s) {
    if (indegree[static_cast<std::size_t>(s)] == 0) order.push_back(s);
  }
  for (std::size_t head = 0; head < order.size(); ++head) {
    for_each_next(order[head], [&](int t) {
      if (--indegree[static_cast<std::size_t>(t)] == 0) order.push_back(t);
    });
  }
  if (order.size() != static_cast<std::size_t>(n)) return std::nullopt;
  std::reverse(order.begin(), order.end());
  return order;
}

QTable solve(const TabularMdp& mdp, const Backup& backup, double tol, int max_sweeps) {
  if (!(tol > 0.0)) throw std::invalid_argument("value iteration tolerance must be positive");
  QTable out;
  out.q.assign(mdp.num_pairs(), 0.0);
  out.value.assign(static_cast<std::size_t>(mdp.num_states()), 0.0);
  auto row = [&](int s) {
    return std::span<const double>(out.q).subspan(mdp.action_offset[static_cast<std::size_t>(s)],
                                                  static_cast<std::size_t>(mdp.num_actions(s)));
  };
  auto fill_q = [&](int s) {
    for (int a = 0; a < mdp.num_actions(s); ++a) {
      const std::size_t sa = mdp.pair(s, a);
      out.q[sa] = mdp.supported[sa] ? q_value(mdp, sa, out.value) : 0.0;
    }
  };

  if (auto order = backward_order(mdp)) {
    for (int s : *order) {
      fill_q(s);
      out.value[static_cast<std::size_t>(s)] = backup(s, row(s));
    }
    out.sweeps = 1;
    out.residual = 0.0;
    return out;
  }
  for (std::size_t sa = 0; sa < mdp.num_pairs(); ++sa) {
    if (!mdp.supported[sa]) continue;
    for (const auto& next : mdp.successors[sa]) {
      if (next.state != kTerminalState && next.discount >= 1.0) {
        throw std::logic_error("value iteration on a cyclic MDP needs discount < 1");
      }
    }
  }
  std::vector<double> next_value(out.value.size());
  for (int sweep = 1; sweep <= max_sweeps; ++sweep) {
    double residual = 0.0;
    for (int s = 0; s < mdp.num_states(); ++s) fill_q(s);
    for (int s = 0; s < mdp.num_states(); ++s) {
      next_value[static_cast<std::size_t>(s)] = backup(s, row(s));
      residual = std::max(residual, std::abs(next_value[static_cast<std::size_t>(s)] -
                                             out.value[static_cast<std::size_t>(s)]));
    }
    out.value.swap(next_value);
    out.sweeps = sweep;
    out.residual = residual;
    if (residual <= tol) break;
  }
  for (int s = 0; s < mdp.num_states(); ++s) fill_q(s);
  return out;
}

std::vector<double> one_hot(std::size_t size, int action) {
  std::vector<double> row(size, 0.0);
  row[static_cast<std::size_t>(action)] = 1.0;
  return row;
}

void check_profile_size(const MarkovGame& game, std::span<const BehaviorPolicy> profile) {
  if (profile.size() != static_cast<std::size_t>(game.num_players())) {
    throw std::invalid_argument("profile needs one policy per player");
  }
}

}  // namespace

int greedy_action(const TabularMdp& mdp, const QTable& q, int s) {
  int best = -1;
  for (int a = 0; a < mdp.num_actions(s); ++a) {
    const std::size_t sa = mdp.pair(s, a);
    if (!mdp.supported[sa]) continue;
    if (best < 0 || q.q[sa] > q.q[mdp.pair(s, best)]) best = a;
  }
  return best;
}

QTable value_iteration(const TabularMdp& mdp, double tol, int max_sweeps) {
  return solve(
      mdp,
      [&mdp](int s, std::span<const double> q_row) {
        double best = 0.0;
        bool any = false;
        for (int a = 0; a < mdp.num_actions(s); ++a) {
          if (!mdp.supported[mdp.pair(s, a)]) continue;
          const double v = q_row[static_cast<std::size_t>(a)];
          if (!any || v > best) best = v;
          any = true;
        }
        return best;
      },
      tol, max_sweeps);
}

// ---------------------------------------------------------------------------
// Exact best response

namespace {

class BestResponder {
 public:
  BestResponder(const MarkovGame& game, int player, std::span<const BehaviorPolicy> profile)
      : game_(game),
        player_(player),
        profile_(profile),
        reach_(reach_probabilities(game, profile, player)),
        node_value_(game.num_nodes(), std::numeric_limits<double>::quiet_NaN()),
        action_(static_cast<std::size_t>(game.num_infostates(player)), -1) {}

  double value(NodeId id) {
    double& memo = node_value_[static_cast<std::size_t>(id)];
    if (!std::isnan(memo)) return memo;
    const Node& node = game_.node(id);
    double v = 0.0;
    if (!node.is_terminal()) {
      const int slot = node.actor_slot(player_);
      const int own = slot >= 0 ? best_action(node.infostates[static_cast<std::size_t>(slot)]) : -1;
      for (int e = 0; e < node.num_edges(); ++e) {
        double p;
        if (node.is_chance()) {
          p = node.chance_probs[static_cast<std::size_t>(e)];
        } else {
          if (slot >= 0 && game_.decode_joint(node, e)[static_cast<std::size_t>(slot)] != own) continue;
          p = joint_action_probability(game_, node, e, profile_, player_);
        }
        if (p == 0.0) continue;
        v += p * edge_value(node, e);
      }
    }
    memo = v;
    return v;
  }

  int best_action(int infostate) {
    int& chosen = action_[static_cast<std::size_t>(infostate)];
    if (chosen >= 0) return chosen;
    const auto& info = game_.infostate(player_, infostate);
    std::vector<double> q(static_cast<std::size_t>(info.num_actions()), 0.0);
    const double gamma = game_.discount();
    for (NodeId h : info.members) {
      const Node& node = game_.node(h);
      double w = reach_[static_cast<std::size_t>(h)];
      if (w == 0.0) continue;
      if (gamma != 1.0) w *= std::pow(gamma, node.depth);
      const int slot = node.actor_slot(player_);
      for (int e = 0; e < node.num_edges(); ++e) {
        const double p = joint_action_probability(game_, node, e, profile_, player_);
        if (p == 0.0) continue;
        const int a = game_.decode_joint(node, e)[static_cast<std::size_t>(slot)];
        q[static_cast<std::size_t>(a)] += w * p * edge_value(node, e);
      }
    }
    int best = 0;
    for (int a = 1; a < info.num_actions(); ++a) {
      if (q[static_cast<std::size_t>(a)] > q[static_cast<std::size_t>(best)]) best = a;
    }
    chosen = best;
    return best;
  }

 private:
  double edge_value(const Node& node, int e) {
    return game_.edge_reward(node, e, player_) +
           game_.discount() * value(node.children[static_cast<std::size_t>(e)]);
  }

  const MarkovGame& game_;
  int player_;
  std::span<const BehaviorPolicy> profile_;
  std::vector<double> reach_;
  std::vector<double> node_value_;
  std::vector<int> action_;
};

}  // namespace

BrResult exact_best_response(const MarkovGame& game, int player,
                             std::span<const BehaviorPolicy> profile, std::size_t node_budget) {
  game.check_budget(node_budget);
  check_profile_size(game, profile);
  BestResponder responder(game, player, profile);
  BrResult result;
  result.kind = OracleKind::kExact;
  result.value = responder.value(game.root());
  std::vector<int> actions(static_cast<std::size_t>(game.num_infostates(player)));
  for (int s = 0; s < game.num_infostates(player); ++s) {
    actions[static_cast<std::size_t>(s)] = responder.best_action(s);
  }
  result.policy = BehaviorPolicy::pure(game, player, actions);
  return result;
}

// ---------------------------------------------------------------------------
// Sample-based oracles

BrResult independent_br(const MarkovGame& game, int player,
                        std::span<const BehaviorPolicy> profile, std::uint64_t budget,
                        std::uint64_t seed) {
  if (budget == 0) throw std::invalid_argument("independent_br needs a positive budget");
  check_profile_size(game, profile);
  Profile explore(profile.begin(), profile.end());
  explore[static_cast<std::size_t>(player)] = BehaviorPolicy::uniform(game, player);
  const auto data = collect(game, explore, budget, seed);
  const auto model = estimate_model(data, game, player);
  const auto q = value_iteration(model.mdp);

  auto policy = BehaviorPolicy::uniform(game, player);
  for (int s = 0; s < model.mdp.num_states(); ++s) {
    const int a = greedy_action(model.mdp, q, s);
    if (a < 0) continue;
    const int info = model.infostate_of_state[static_cast<std::size_t>(s)];
    policy.mutable_probs(info) = one_hot(policy.probs(info).size(), a);
  }
  BrResult result;
  result.policy = std::move(policy);
  result.value = model.start_value(q.value);
  result.episodes_consumed = budget;
  result.kind = OracleKind::kIndependent;
  return result;
}

BrResult naive_jbr(const EstimatedModel& model, const MarkovGame& game,
                   const BehaviorPolicy& baseline) {
  const auto q = value_iteration(model.mdp);
  BehaviorPolicy policy = baseline;
  for (int s = 0; s < model.mdp.num_states(); ++s) {
    const int a = greedy_action(model.mdp, q, s);
    if (a < 0) continue;
    const int info = model.infostate_of_state[static_cast<std::size_t>(s)];
    policy.mutable_probs(info) = one_hot(policy.probs(info).size(), a);
  }
  (void)game;
  BrResult result;
  result.policy = std::move(policy);
  result.value = model.start_value(q.value);
  result.kind = OracleKind::kNaiveJbr;
  return result;
}

BrResult naive_jbr(const JointDataset& data, const MarkovGame& game, int player,
                   const BehaviorPolicy& baseline) {
  if (baseline.player() != player) throw std::invalid_argument("baseline for the wrong player");
  return naive_jbr(estimate_model(data, game, player), game, baseline);
}

std::vector<std::vector<bool>> uncertain_pairs(const EstimatedModel& model, const MarkovGame& game,
                                               std::int64_t n_wedge) {
  std::vector<std::vector<bool>> mask(static_cast<std::size_t>(game.num_infostates(model.player)));
  for (int s = 0; s < game.num_infostates(model.player); ++s) {
    auto& row = mask[static_cast<std::size_t>(s)];
    row.resize(static_cast<std::size_t>(game.infostate(model.player, s).num_actions()));
    for (std::size_t a = 0; a < row.size(); ++a) row[a] = model.count(s, static_cast<int>(a)) < n_wedge;
  }
  return mask;
}

namespace {

// Action that receives the unpinned mass at a state: the best supported
// action outside the uncertain set, lowest index on ties; -1 if none.
int free_action(const TabularMdp& mdp, int s, std::span<const double> q_row,
                const std::vector<bool>& uncertain) {
  int best = -1;
  for (int a = 0; a < mdp.num_actions(s); ++a) {
    if (uncertain[static_cast<std::size_t>(a)] || !mdp.supported[mdp.pair(s, a)]) continue;
    if (best < 0 || q_row[static_cast<std::size_t>(a)] > q_row[static_cast<std::size_t>(best)]) best = a;
  }
  return best;
}

}  // namespace

BrResult spi_jbr(const EstimatedModel& model, const MarkovGame& game, const SpiConfig& cfg) {
  if (cfg.n_wedge < 0) throw std::invalid_argument("n_wedge must be nonnegative");
  if (cfg.baseline.player() != model.player) throw std::invalid_argument("baseline for the wrong player");
  const auto mask = uncertain_pairs(model, game, cfg.n_wedge);
  const auto& mdp = model.mdp;
  auto state_mask = [&](int s) -> const std::vector<bool>& {
    return mask[static_cast<std::size_t>(model.infostate_of_state[static_cast<std::size_t>(s)])];
  };
  auto baseline_row = [&](int s) {
    return cfg.baseline.probs(model.infostate_of_state[static_cast<std::size_t>(s)]);
  };

  const auto q = solve(
      mdp,
      [&](int s, std::span<const double> q_row) {
        const auto& uncertain = state_mask(s);
        const auto sigma = baseline_row(s);
        const int f = free_action(mdp, s, q_row, uncertain);
        double v = 0.0;
        if (f < 0) {
          for (std::size_t a = 0; a < sigma.size(); ++a) v += sigma[a] * q_row[a];
          return v;
        }
        double pinned = 0.0;
        for (std::size_t a = 0; a < sigma.size(); ++a) {
          if (!uncertain[a]) continue;
          pinned += sigma[a];
          v += sigma[a] * q_row[a];
        }
        return v + (1.0 - pinned) * q_row[static_cast<std::size_t>(f)];
      },
      kDefaultTolerance, kDefaultMaxSweeps);

  BehaviorPolicy policy = cfg.baseline;
  for (int s = 0; s < mdp.num_states(); ++s) {
    const auto q_row = std::span<const double>(q.q).subspan(
        mdp.action_offset[static_cast<std::size_t>(s)], static_cast<std::size_t>(mdp.num_actions(s)));
    const auto& uncertain = state_mask(s);
    const int f = free_action(mdp, s, q_row, uncertain);
    if (f < 0) continue;  // keeps the baseline row
    const int info = model.infostate_of_state[static_cast<std::size_t>(s)];
    const auto sigma = cfg.baseline.probs(info);
    std::vector<double> row(sigma.size(), 0.0);
    double pinned = 0.0;
    for (std::size_t a = 0; a < sigma.size(); ++a) {
      if (!uncertain[a]) continue;
      row[a] = sigma[a];
      pinned += sigma[a];
    }
    row[static_cast<std::size_t>(f)] = 1.0 - pinned;
    policy.mutable_probs(info) = std::move(row);
  }
  BrResult result;
  result.policy = std::move(policy);
  result.value = model.start_value(q.value);
  result.kind = OracleKind::kSpiJbr;
  result.n_wedge = static_cast<int>(cfg.n_wedge);
  return result;
}

BrResult spi_jbr(const JointDataset& data, const MarkovGame& game, int player,
                 const SpiConfig& cfg) {
  return spi_jbr(estimate_model(data, game, player), game, cfg);
}

}  // namespace jbr
