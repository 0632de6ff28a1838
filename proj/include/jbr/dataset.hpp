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

#ifndef JBR_DATASET_HPP
#define JBR_DATASET_HPP

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jbr/game.hpp"
#include "jbr/mdp.hpp"
#include "jbr/policy.hpp"

namespace jbr {

enum class ExplorationKind : std::uint8_t { kNone = 0, kRandom = 1, kTargeted = 2 };

std::string to_string(ExplorationKind kind);
ExplorationKind parse_exploration_kind(std::string_view text);

// Per-infostate mixing (1 - delta) * sigma + delta * nu used while collecting.
// `targeted` holds nu per player when kind == kTargeted.
struct ExplorationSpec {
  double delta = 0.0;
  ExplorationKind kind = ExplorationKind::kNone;
  std::vector<BehaviorPolicy> targeted;

  void validate() const;
};

// Describes how a dataset was collected; written into the binary header.
struct CollectionTag {
  std::uint64_t base_profile_hash = 0;
  double delta = 0.0;
  ExplorationKind kind = ExplorationKind::kNone;

  friend bool operator==(const CollectionTag&, const CollectionTag&) = default;
};

// Joint transitions recorded while every player follows one shared profile.
// Chance steps are stored too (actions all -1, `chance` set). Counts are
// N_D(infostate, action) per player, derived from the transitions.
class JointDataset {
 public:
  struct Transition {
    NodeId state = kNoNode;
    NodeId next = kNoNode;
    std::int32_t chance = -1;
    std::vector<std::int32_t> actions;
    std::vector<double> rewards;

    friend bool operator==(const Transition&, const Transition&) = default;
  };

  JointDataset() = default;
  JointDataset(const MarkovGame& game, CollectionTag tag);

  const GameId& game_id() const { return game_id_; }
  int num_players() const { return num_players_; }
  const CollectionTag& tag() const { return tag_; }
  std::uint64_t num_episodes() const { return episodes_; }
  const std::vector<Transition>& transitions() const { return transitions_; }

  std::int64_t count(int player, int infostate, int action) const;
  const std::vector<std::vector<std::int64_t>>& counts(int player) const {
    return counts_[static_cast<std::size_t>(player)];
  }

  // Appends one finished episode. Transitions must end in a terminal node.
  void append_episode(const MarkovGame& game, std::span<const Transition> episode);
  // Appends all episodes of `other` (same game) in order.
  void merge(const MarkovGame& game, const JointDataset& other);

  // Recomputes counts and episode totals from the transition list and throws
  // std::logic_error on mismatch.
  void check_consistency(const MarkovGame& game) const;

  // Little-endian binary stream:
  //   "JBRD" u32 version | u32 len + game id | u64 profile hash | f64 delta |
  //   u8 kind | u32 players | u64 episodes | u64 transitions |
  //   per transition: u32 byte length, i32 state, i32 next, i32 chance,
  //                   i32 action[players], f64 reward[players]
  void write_binary(std::ostream& out) const;
  static JointDataset read_binary(std::istream& in, const MarkovGame& game);
  // One row per transition with history strings for inspection.
  void write_csv(std::ostream& out, const MarkovGame& game) const;

  friend bool operator==(const JointDataset&, const JointDataset&) = default;

 private:
  void count_transition(const MarkovGame& game, const Transition& t);

  GameId game_id_;
  int num_players_ = 0;
  CollectionTag tag_;
  std::uint64_t episodes_ = 0;
  std::vector<Transition> transitions_;
  std::vector<std::vector<std::vector<std::int64_t>>> counts_;
};

// Applies the exploration mixture to each player's policy. kNone (or
// delta == 0) returns the profile unchanged.
Profile perturb(std::span<const BehaviorPolicy> profile, const ExplorationSpec& spec,
                const MarkovGame& game);

// Largest per-infostate L1 distance the mixture can introduce: 2 * delta.
double l1_perturbation_bound(const ExplorationSpec& spec);

// Samples `episodes` episodes under `profile`. Episodes are split into
// fixed-size shards with independent streams derived from `seed`, so the
// result does not depend on `jobs`. Throws std::invalid_argument if
// episodes == 0.
JointDataset collect(const MarkovGame& game, std::span<const BehaviorPolicy> profile,
                     std::uint64_t episodes, std::uint64_t seed, CollectionTag tag = {},
                     int jobs = 1);

inline constexpr std::uint64_t kShardEpisodes = 1024;

// Maximum-likelihood decision-point model of one player. States are the
// player's infostates observed as decision points; a successor is the next
// own decision or termination, rewards are summed in between.
struct EstimatedModel {
  int player = 0;
  TabularMdp mdp;                       // unobserved pairs unsupported
  std::vector<std::int64_t> counts;     // per pair
  std::vector<int> infostate_of_state;
  std::vector<int> state_of_infostate;  // -1 when never observed
  std::vector<Successor> initial;       // empirical first-decision distribution
  double initial_reward = 0.0;

  bool supported(int infostate, int action) const;
  std::int64_t count(int infostate, int action) const;
  double start_value(std::span<const double> state_values) const;
};

EstimatedModel estimate_model(const JointDataset& data, const MarkovGame& game, int player);

}  // namespace jbr

#endif  // JBR_DATASET_HPP
