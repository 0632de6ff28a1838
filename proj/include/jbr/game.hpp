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

#ifndef JBR_GAME_HPP
#define JBR_GAME_HPP

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace jbr {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

// Upper bound on tree size for anything that enumerates the full game.
inline constexpr std::size_t kDefaultNodeBudget = 2'000'000;

class NodeBudgetExceeded : public std::length_error {
 public:
  using std::length_error::length_error;
};

enum class GameKind { kKuhn, kLeduc, kMatrix };

// Parsed from "kuhn", "leduc" or "matrix:<seed>:<m>x<n>".
struct GameId {
  GameKind kind = GameKind::kKuhn;
  std::uint64_t seed = 0;
  int rows = 0;
  int cols = 0;

  static GameId parse(std::string_view text);
  std::string to_string() const;
  friend bool operator==(const GameId&, const GameId&) = default;
};

struct PayoffBounds {
  double lo = 0.0;
  double hi = 0.0;
  double range() const { return hi - lo; }
};

enum class NodeKind : std::uint8_t { kChance, kDecision, kTerminal };

// One history of the game. Histories are the states of the Markov game, so
// every node has exactly one parent. Node ids are assigned in preorder, so a
// child always has a larger id than its parent.
struct Node {
  NodeKind kind = NodeKind::kTerminal;
  NodeId parent = kNoNode;
  int parent_edge = -1;
  int depth = 0;
  std::string history;

  // Decision nodes: acting players in ascending order and, per actor, the
  // player-local infostate index and its number of legal actions. Several
  // actors make a simultaneous-move node.
  std::vector<int> actors;
  std::vector<int> infostates;
  std::vector<int> num_actions;

  // Chance nodes: outcome probabilities, parallel to `children`.
  std::vector<double> chance_probs;

  // Decision nodes index children by joint action (mixed radix over actors,
  // first actor most significant); chance nodes by outcome.
  std::vector<NodeId> children;

  // Reward vector received on each outgoing edge, flat [edge * num_players + p].
  std::vector<double> edge_rewards;

  bool is_terminal() const { return kind == NodeKind::kTerminal; }
  bool is_chance() const { return kind == NodeKind::kChance; }
  bool is_decision() const { return kind == NodeKind::kDecision; }
  int num_edges() const { return static_cast<int>(children.size()); }

  // Position of `player` in `actors`, or -1.
  int actor_slot(int player) const;
};

struct Infostate {
  int player = 0;
  std::string key;
  std::vector<std::string> action_labels;
  std::vector<NodeId> members;
  // The player's previous own decision (infostate index, action) on the way
  // here, or -1 at a first decision. Unique under perfect recall.
  int parent = -1;
  int parent_action = -1;

  int num_actions() const { return static_cast<int>(action_labels.size()); }
};

// Finite multi-player game over histories, with chance nodes and per-player
// perfect-recall information states. Immutable once built.
class MarkovGame {
 public:
  const GameId& id() const { return id_; }
  int num_players() const { return num_players_; }
  double discount() const { return discount_; }
  const PayoffBounds& payoff_bounds() const { return bounds_; }
  bool zero_sum() const { return zero_sum_; }

  NodeId root() const { return 0; }
  std::size_t num_nodes() const { return nodes_.size(); }
  const Node& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }
  std::span<const Node> nodes() const { return nodes_; }

  int num_infostates(int player) const {
    return static_cast<int>(infostates_[static_cast<std::size_t>(player)].size());
  }
  const Infostate& infostate(int player, int index) const {
    return infostates_[static_cast<std::size_t>(player)][static_cast<std::size_t>(index)];
  }
  std::optional<int> find_infostate(int player, std::string_view key) const;

  double edge_reward(const Node& node, int edge, int player) const {
    return node.edge_rewards[static_cast<std::size_t>(edge * num_players_ + player)];
  }

  // Joint-action encoding at decision nodes.
  int num_joint_actions(const Node& node) const;
  int encode_joint(const Node& node, std::span<const int> actor_actions) const;
  std::vector<int> decode_joint(const Node& node, int joint) const;

  // Throws NodeBudgetExceeded when the tree is larger than `node_budget`.
  void check_budget(std::size_t node_budget) const;

 private:
  friend class GameBuilder;

  GameId id_;
  int num_players_ = 2;
  double discount_ = 1.0;
  PayoffBounds bounds_;
  bool zero_sum_ = true;
  std::vector<Node> nodes_;
  std::vector<std::vector<Infostate>> infostates_;
  std::vector<std::map<std::string, int, std::less<>>> infostate_index_;
};

// Incremental construction of a MarkovGame in preorder. `finish` validates
// the structural invariants (chance normalization, perfect recall, zero-sum
// rewards) and throws std::logic_error on violation.
class GameBuilder {
 public:
  GameBuilder(GameId id, int num_players, double discount, PayoffBounds bounds, bool zero_sum,
              std::size_t node_budget = kDefaultNodeBudget);

  NodeId add_terminal(std::string history);
  NodeId add_chance(std::string history, std::vector<double> probs);

  struct ActorSpec {
    int player;
    std::string infostate_key;
    std::vector<std::string> action_labels;
  };
  NodeId add_decision(std::string history, std::vector<ActorSpec> actors);

  // Links edge `edge` of `parent` to `child`, with the reward vector earned
  // on that edge (empty means all zero).
  void link(NodeId parent, int edge, NodeId child, std::vector<double> rewards = {});

  MarkovGame finish() &&;

 private:
  NodeId push(Node node);

  MarkovGame game_;
  std::size_t node_budget_;
};

}  // namespace jbr

#endif  // JBR_GAME_HPP
