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

#include "jbr/game.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <sstream>

namespace jbr {
namespace {

template <typename T>
bool parse_number(std::string_view text, T& out) {
  if (text.empty()) return false;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, out);
  return ec == std::errc() && ptr == end;
}

}  // namespace

GameId GameId::parse(std::string_view text) {
  if (text == "kuhn") return GameId{GameKind::kKuhn};
  if (text == "leduc") return GameId{GameKind::kLeduc};
  constexpr std::string_view kPrefix = "matrix:";
  if (text.starts_with(kPrefix)) {
    std::string_view rest = text.substr(kPrefix.size());
    const auto colon = rest.find(':');
    if (colon != std::string_view::npos) {
      std::string_view dims = rest.substr(colon + 1);
      const auto x = dims.find('x');
      GameId id{GameKind::kMatrix};
      if (x != std::string_view::npos && parse_number(rest.substr(0, colon), id.seed) &&
          parse_number(dims.substr(0, x), id.rows) && parse_number(dims.substr(x + 1), id.cols) &&
          id.rows >= 1 && id.cols >= 1) {
        return id;
      }
    }
  }
  throw std::invalid_argument("unknown game id '" + std::string(text) +
                              "' (expected kuhn, leduc or matrix:<seed>:<m>x<n>)");
}

std::string GameId::to_string() const {
  switch (kind) {
    case GameKind::kKuhn:
      return "kuhn";
    case GameKind::kLeduc:
      return "leduc";
    case GameKind::kMatrix:
      return "matrix:" + std::to_string(seed) + ":" + std::to_string(rows) + "x" +
             std::to_string(cols);
  }
  return "?";
}

int Node::actor_slot(int player) const {
  for (std::size_t k = 0; k < actors.size(); ++k) {
    if (actors[k] == player) return static_cast<int>(k);
  }
  return -1;
}

std::optional<int> MarkovGame::find_infostate(int player, std::string_view key) const {
  if (player < 0 || player >= num_players_) return std::nullopt;
  const auto& index = infostate_index_[static_cast<std::size_t>(player)];
  auto it = index.find(key);
  if (it == index.end()) return std::nullopt;
  return it->second;
}

int MarkovGame::num_joint_actions(const Node& node) const {
  int total = 1;
  for (int n : node.num_actions) total *= n;
  return total;
}

int MarkovGame::encode_joint(const Node& node, std::span<const int> actor_actions) const {
  int joint = 0;
  for (std::size_t k = 0; k < node.actors.size(); ++k) {
    joint = joint * node.num_actions[k] + actor_actions[k];
  }
  return joint;
}

std::vector<int> MarkovGame::decode_joint(const Node& node, int joint) const {
  std::vector<int> out(node.actors.size());
  for (std::size_t k = node.actors.size(); k-- > 0;) {
    out[k] = joint % node.num_actions[k];
    joint /= node.num_actions[k];
  }
  return out;
}

void MarkovGame::check_budget(std::size_t node_budget) const {
  if (nodes_.size() > node_budget) {
    throw NodeBudgetExceeded("game tree has " + std::to_string(nodes_.size()) +
                             " nodes, budget is " + std::to_string(node_budget));
  }
}

GameBuilder::GameBuilder(GameId id, int num_players, double discount, PayoffBounds bounds,
                         bool zero_sum, std::size_t node_budget)
    : node_budget_(node_budget) {
  if (num_players < 2) throw std::invalid_argument("a game needs at least two players");
  if (!(discount >= 0.0 && discount <= 1.0)) throw std::invalid_argument("discount outside [0,1]");
  game_.id_ = id;
  game_.num_players_ = num_players;
  game_.discount_ = discount;
  game_.bounds_ = bounds;
  game_.zero_sum_ = zero_sum;
  game_.infostates_.resize(static_cast<std::size_t>(num_players));
  game_.infostate_index_.resize(static_cast<std::size_t>(num_players));
}

NodeId GameBuilder::push(Node node) {
  if (game_.nodes_.size() >= node_budget_) {
    throw NodeBudgetExceeded("game tree exceeds node budget of " + std::to_string(node_budget_));
  }
  game_.nodes_.push_back(std::move(node));
  return static_cast<NodeId>(game_.nodes_.size() - 1);
}

NodeId GameBuilder::add_terminal(std::string history) {
  Node node;
  node.kind = NodeKind::kTerminal;
  node.history = std::move(history);
  return push(std::move(node));
}

NodeId GameBuilder::add_chance(std::string history, std::vector<double> probs) {
  Node node;
  node.kind = NodeKind::kChance;
  node.history = std::move(history);
  node.children.assign(probs.size(), kNoNode);
  node.edge_rewards.assign(probs.size() * static_cast<std::size_t>(game_.num_players_), 0.0);
  node.chance_probs = std::move(probs);
  return push(std::move(node));
}

NodeId GameBuilder::add_decision(std::string history, std::vector<ActorSpec> actors) {
  std::sort(actors.begin(), actors.end(),
            [](const ActorSpec& a, const ActorSpec& b) { return a.player < b.player; });
  Node node;
  node.kind = NodeKind::kDecision;
  node.history = std::move(history);
  const auto id = static_cast<NodeId>(game_.nodes_.size());
  int joint = 1;
  for (auto& actor : actors) {
    if (actor.player < 0 || actor.player >= game_.num_players_) {
      throw std::logic_error("actor index out of range at " + node.history);
    }
    if (actor.action_labels.empty()) {
      throw std::logic_error("decision without legal actions at " + node.history);
    }
    auto& table = game_.infostates_[static_cast<std::size_t>(actor.player)];
    auto& index = game_.infostate_index_[static_cast<std::size_t>(actor.player)];
    auto it = index.find(actor.infostate_key);
    int info;
    if (it == index.end()) {
      info = static_cast<int>(table.size());
      Infostate fresh;
      fresh.player = actor.player;
      fresh.key = actor.infostate_key;
      fresh.action_labels = actor.action_labels;
      table.push_back(std::move(fresh));
      index.emplace(actor.infostate_key, info);
    } else {
      info = it->second;
      if (table[static_cast<std::size_t>(info)].action_labels != actor.action_labels) {
        throw std::logic_error("infostate '" + actor.infostate_key +
                               "' has inconsistent legal actions");
      }
    }
    table[static_cast<std::size_t>(info)].members.push_back(id);
    node.actors.push_back(actor.player);
    node.infostates.push_back(info);
    node.num_actions.push_back(static_cast<int>(actor.action_labels.size()));
    joint *= static_cast<int>(actor.action_labels.size());
  }
  node.children.assign(static_cast<std::size_t>(joint), kNoNode);
  node.edge_rewards.assign(static_cast<std::size_t>(joint * game_.num_players_), 0.0);
  return push(std::move(node));
}

void GameBuilder::link(NodeId parent, int edge, NodeId child, std::vector<double> rewards) {
  auto& p = game_.nodes_.at(static_cast<std::size_t>(parent));
  auto& c = game_.nodes_.at(static_cast<std::size_t>(child));
  if (child <= parent) throw std::logic_error("children must be added after their parent");
  if (edge < 0 || edge >= p.num_edges()) throw std::logic_error("edge index out of range");
  if (p.children[static_cast<std::size_t>(edge)] != kNoNode || c.parent != kNoNode) {
    throw std::logic_error("edge linked twice");
  }
  p.children[static_cast<std::size_t>(edge)] = child;
  c.parent = parent;
  c.parent_edge = edge;
  c.depth = p.depth + 1;
  if (!rewards.empty()) {
    if (rewards.size() != static_cast<std::size_t>(game_.num_players_)) {
      throw std::logic_error("reward vector size mismatch");
    }
    std::copy(rewards.begin(), rewards.end(),
              p.edge_rewards.begin() + static_cast<std::ptrdiff_t>(edge * game_.num_players_));
  }
}

MarkovGame GameBuilder::finish() && {
  auto& g = game_;
  if (g.nodes_.empty()) throw std::logic_error("empty game");
  const int n = g.num_players_;

  for (const auto& node : g.nodes_) {
    if (node.kind != NodeKind::kTerminal && node.children.empty()) {
      throw std::logic_error("non-terminal node without edges at " + node.history);
    }
    for (NodeId child : node.children) {
      if (child == kNoNode) throw std::logic_error("unlinked edge at " + node.history);
    }
    if (node.is_chance()) {
      double total = 0.0;
      for (double p : node.chance_probs) {
        if (p < 0.0) throw std::logic_error("negative chance probability at " + node.history);
        total += p;
      }
      if (std::abs(total - 1.0) > 1e-9) {
        throw std::logic_error("chance probabilities do not sum to one at " + node.history);
      }
    }
    if (g.zero_sum_) {
      for (int e = 0; e < node.num_edges(); ++e) {
        double sum = 0.0;
        for (int p = 0; p < n; ++p) sum += g.edge_reward(node, e, p);
        if (sum != 0.0) throw std::logic_error("non-zero-sum reward at " + node.history);
      }
    }
  }

  // Perfect recall: all members of an infostate share the owner's previous
  // (infostate, action). Walk down once, carrying the last own decision.
  std::vector<std::vector<std::pair<int, int>>> last(g.nodes_.size(),
                                                     std::vector<std::pair<int, int>>(
                                                         static_cast<std::size_t>(n), {-1, -1}));
  std::vector<std::vector<bool>> seen(static_cast<std::size_t>(n));
  for (int p = 0; p < n; ++p) {
    seen[static_cast<std::size_t>(p)].assign(g.infostates_[static_cast<std::size_t>(p)].size(),
                                             false);
  }
  for (std::size_t id = 0; id < g.nodes_.size(); ++id) {
    const auto& node = g.nodes_[id];
    for (std::size_t k = 0; k < node.actors.size(); ++k) {
      const int p = node.actors[k];
      auto& info = g.infostates_[static_cast<std::size_t>(p)][static_cast<std::size_t>(node.infostates[k])];
      const auto prev = last[id][static_cast<std::size_t>(p)];
      auto was_seen = seen[static_cast<std::size_t>(p)][static_cast<std::size_t>(node.infostates[k])];
      if (!was_seen) {
        info.parent = prev.first;
        info.parent_action = prev.second;
        was_seen = true;
      } else if (info.parent != prev.first || info.parent_action != prev.second) {
        throw std::logic_error("perfect recall violated at infostate '" + info.key + "'");
      }
    }
    for (int e = 0; e < node.num_edges(); ++e) {
      auto& child_last = last[static_cast<std::size_t>(node.children[static_cast<std::size_t>(e)])];
      child_last = last[id];
      if (node.is_decision()) {
        const auto actions = g.decode_joint(node, e);
        for (std::size_t k = 0; k < node.actors.size(); ++k) {
          child_last[static_cast<std::size_t>(node.actors[k])] = {node.infostates[k], actions[k]};
        }
      }
    }
    last[id].clear();
    last[id].shrink_to_fit();
  }
  return std::move(game_);
}

}  // namespace jbr
