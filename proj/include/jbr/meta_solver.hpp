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

#ifndef JBR_META_SOLVER_HPP
#define JBR_META_SOLVER_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "jbr/game.hpp"
#include "jbr/policy.hpp"

namespace jbr {

// How restricted-game payoffs are obtained.
struct EvalMode {
  enum Kind : std::uint8_t { kExact, kRollout };
  Kind kind = kExact;
  std::uint64_t rollouts = 0;  // episodes per profile in rollout mode
  std::uint64_t seed = 0;      // rollout mode only

  std::string to_string() const;  // "exact" or "rollout(<n>)"

  friend bool operator==(const EvalMode&, const EvalMode&) = default;
};

// Per-player probability vectors over the restricted policy sets.
using MetaProfile = std::vector<std::vector<double>>;

// The restricted normal-form game over per-player policy lists. Payoffs are
// stored per player as flat row-major tensors, player 0 most significant.
class EmpiricalGame {
 public:
  EmpiricalGame() = default;
  explicit EmpiricalGame(int num_players, EvalMode mode = {});

  int num_players() const { return num_players_; }
  const EvalMode& mode() const { return mode_; }
  const std::vector<BehaviorPolicy>& policies(int player) const {
    return policies_[static_cast<std::size_t>(player)];
  }
  std::vector<int> shape() const;
  std::size_t num_profiles() const;
  std::size_t flat_index(std::span<const int> pure) const;
  double payoff(int player, std::span<const int> pure) const {
    return payoffs_[static_cast<std::size_t>(player)][flat_index(pure)];
  }
  const std::vector<double>& payoffs(int player) const {
    return payoffs_[static_cast<std::size_t>(player)];
  }

  // Appends one policy per player and evaluates only the profiles that use
  // a new policy. Returns how many profiles were evaluated.
  std::size_t extend(std::span<const BehaviorPolicy> new_policies, const MarkovGame& game);

  // Self-describing JSON checkpoint: mode, policy tables and tensors.
  void save(std::ostream& out) const;
  static EmpiricalGame load(std::istream& in);

  friend bool operator==(const EmpiricalGame&, const EmpiricalGame&) = default;

 private:
  std::vector<double> evaluate(const MarkovGame& game, std::span<const int> pure,
                               std::size_t flat) const;

  int num_players_ = 0;
  EvalMode mode_;
  std::vector<std::vector<BehaviorPolicy>> policies_;
  std::vector<std::vector<double>> payoffs_;
};

struct PrdOptions {
  int steps = 100'000;
  double dt = 1e-3;
  double floor = 1e-10;
};

// Replicator dynamics with a Euclidean projection onto the floored simplex
// after every step, started from uniform. Returns the mean of the second
// half of the trajectory.
MetaProfile projected_replicator_dynamics(const EmpiricalGame& eg, const PrdOptions& opts = {});

// Expected payoff of every pure policy of `player` against the others'
// mixtures.
std::vector<double> deviation_payoffs(const EmpiricalGame& eg, const MetaProfile& profile,
                                      int player);

// Sum over players of the best pure deviation gain inside the restricted game.
double restricted_regret(const EmpiricalGame& eg, const MetaProfile& profile);

// Euclidean projection of `x` onto {y : y >= floor, sum(y) = 1}.
void project_to_simplex(std::span<double> x, double floor);

}  // namespace jbr

#endif  // JBR_META_SOLVER_HPP
