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

#ifndef JBR_POLICY_HPP
#define JBR_POLICY_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "jbr/game.hpp"
#include "jbr/rng.hpp"

namespace jbr {

// Per-infostate action distribution for one player. Rows are indexed by the
// player-local infostate index of the game the policy was built for.
class BehaviorPolicy {
 public:
  BehaviorPolicy() = default;
  BehaviorPolicy(int player, std::vector<std::vector<double>> table)
      : player_(player), table_(std::move(table)) {}

  static BehaviorPolicy uniform(const MarkovGame& game, int player);
  // Deterministic policy playing `actions[infostate]`.
  static BehaviorPolicy pure(const MarkovGame& game, int player, std::span<const int> actions);
  // Independent uniform-simplex draw at every infostate.
  static BehaviorPolicy random(const MarkovGame& game, int player, Rng& rng);

  int player() const { return player_; }
  std::size_t num_infostates() const { return table_.size(); }
  std::span<const double> probs(int infostate) const {
    return table_[static_cast<std::size_t>(infostate)];
  }
  std::vector<double>& mutable_probs(int infostate) {
    return table_[static_cast<std::size_t>(infostate)];
  }
  const std::vector<std::vector<double>>& table() const { return table_; }

  // Throws std::invalid_argument unless every row is a distribution over the
  // legal actions of the matching infostate of `game` (tolerance 1e-9).
  void validate(const MarkovGame& game) const;

  // FNV-1a over the player index and the raw table bits.
  std::uint64_t hash() const;

  friend bool operator==(const BehaviorPolicy&, const BehaviorPolicy&) = default;

 private:
  int player_ = 0;
  std::vector<std::vector<double>> table_;
};

using Profile = std::vector<BehaviorPolicy>;

std::uint64_t profile_hash(std::span<const BehaviorPolicy> profile);

// One uniform behavior policy per player.
Profile uniform_profile(const MarkovGame& game);

// Largest per-infostate L1 distance between two policies of the same player.
double max_l1_distance(const BehaviorPolicy& a, const BehaviorPolicy& b);

}  // namespace jbr

#endif  // JBR_POLICY_HPP
