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

#ifndef JBR_ORACLES_HPP
#define JBR_ORACLES_HPP

#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "jbr/dataset.hpp"
#include "jbr/game.hpp"
#include "jbr/induced_mdp.hpp"
#include "jbr/mdp.hpp"
#include "jbr/policy.hpp"

namespace jbr {

// Action values for every pair of a TabularMdp. Unsupported pairs hold 0 and
// never take part in a max.
struct QTable {
  std::vector<double> q;       // per pair
  std::vector<double> value;   // per state, value of the backup policy
  double residual = 0.0;       // final sup-norm Bellman residual
  int sweeps = 0;

  double at(const TabularMdp& mdp, int s, int a) const { return q[mdp.pair(s, a)]; }
};

inline constexpr double kDefaultTolerance = 1e-9;
inline constexpr int kDefaultMaxSweeps = 10'000;

// Bellman optimality iteration restricted to supported pairs. When every
// successor discount is < 1 it sweeps until the residual drops to `tol`;
// otherwise the successor graph must be acyclic and a single backward pass in
// topological order is exact. Throws std::invalid_argument if tol <= 0 and
// std::logic_error for a cyclic MDP with discount 1.
QTable value_iteration(const TabularMdp& mdp, double tol = kDefaultTolerance,
                       int max_sweeps = kDefaultMaxSweeps);

// Lowest-index argmax over supported actions of state s, or -1 if none.
int greedy_action(const TabularMdp& mdp, const QTable& q, int s);

enum class OracleKind { kExact, kIndependent, kNaiveJbr, kSpiJbr };
std::string to_string(OracleKind kind);

struct BrResult {
  BehaviorPolicy policy;
  double value = 0.0;  // value of `policy` against the target, as the oracle sees it
  std::uint64_t episodes_consumed = 0;
  OracleKind kind = OracleKind::kExact;
  int n_wedge = -1;    // SPI threshold that produced the policy, if any
};

struct SpiConfig {
  std::int64_t n_wedge = 0;
  BehaviorPolicy baseline;
};

// Deterministic best response by backward induction over the opponents'
// reach-weighted infostate tree. `profile[player]` is ignored.
BrResult exact_best_response(const MarkovGame& game, int player,
                             std::span<const BehaviorPolicy> profile,
                             std::size_t node_budget = kDefaultNodeBudget);

// Sample-based response: `budget` private episodes with the player acting
// uniformly at random against `profile`, model estimation, value iteration,
// greedy extraction. Never-visited infostates stay uniform.
BrResult independent_br(const MarkovGame& game, int player,
                        std::span<const BehaviorPolicy> profile, std::uint64_t budget,
                        std::uint64_t seed);

// Offline response from a shared dataset: greedy on supported pairs, the
// baseline wherever the player has no supported action.
BrResult naive_jbr(const EstimatedModel& model, const MarkovGame& game,
                   const BehaviorPolicy& baseline);
BrResult naive_jbr(const JointDataset& data, const MarkovGame& game, int player,
                   const BehaviorPolicy& baseline);

// Offline response under the safe-improvement constraint: pairs seen fewer
// than n_wedge times keep the baseline probability, the remaining mass goes
// to the best well-supported action.
BrResult spi_jbr(const EstimatedModel& model, const MarkovGame& game, const SpiConfig& cfg);
BrResult spi_jbr(const JointDataset& data, const MarkovGame& game, int player,
                 const SpiConfig& cfg);

// Pairs (infostate, action) with count < n_wedge, as a per-infostate mask.
std::vector<std::vector<bool>> uncertain_pairs(const EstimatedModel& model, const MarkovGame& game,
                                               std::int64_t n_wedge);

}  // namespace jbr

#endif  // JBR_ORACLES_HPP
