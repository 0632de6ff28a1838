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

#ifndef JBR_PSRO_HPP
#define JBR_PSRO_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "jbr/dataset.hpp"
#include "jbr/game.hpp"
#include "jbr/meta_solver.hpp"
#include "jbr/oracles.hpp"
#include "jbr/policy.hpp"

namespace jbr {

// Which response oracle a PSRO run uses outside hybrid IBR iterations.
enum class OracleMode : std::uint8_t { kIndependent, kNaiveJbr, kSpiJbr };

inline constexpr double kDefaultRandomDelta = 0.1;
inline constexpr double kDefaultTargetedDelta = 0.5;
inline constexpr std::int64_t kSpiSweepMax = 50;

struct RunConfig {
  GameId game;
  int iterations = 100;
  OracleMode mode = OracleMode::kIndependent;
  std::uint64_t budget = 10'000;  // per player for IBR, shared for JBR
  ExplorationKind exploration = ExplorationKind::kNone;
  double delta = -1.0;            // < 0 picks the default for the kind
  std::int64_t spi_n_wedge = -1;  // < 0 sweeps 0..kSpiSweepMax against the exact value
  int hybrid_k = 0;               // 0 never switches to IBR
  std::uint64_t seed = 0;
  PrdOptions prd;
  std::size_t node_budget = kDefaultNodeBudget;

  // Throws std::invalid_argument when a field is out of range.
  void validate() const;
  double effective_delta() const;
  // Short label such as "psro", "jbr-dt" or "hbr10-dt".
  std::string method() const;
};

// Parses a method label into the oracle fields of `cfg`:
// psro, jbr, jbr-spi, jbr-dr, jbr-dt, hbr<k>[-spi|-dr|-dt].
void apply_method(RunConfig& cfg, std::string_view label);

struct IterationRecord {
  int iteration = 0;
  OracleKind kind = OracleKind::kIndependent;
  std::vector<double> br_values;  // exact value of each new BR against the others' meta-strategy
  double nashconv = 0.0;
  double min_nashconv = 0.0;
  std::uint64_t cumulative_episodes = 0;
  double wall_time_s = 0.0;
};

struct RunResult {
  std::vector<IterationRecord> records;
  EmpiricalGame empirical_game;
  MetaProfile meta_profile;
  int collect_calls = 0;  // shared-dataset collections, one per JBR iteration
};

using RecordSink = std::function<void(const IterationRecord&)>;

// Runs T iterations of PSRO. `sink` sees each record as soon as it exists,
// so callers can flush partial output if a later iteration throws.
RunResult run_psro(const RunConfig& cfg, const RecordSink& sink = {});

// Episodes charged by iteration t (1-based) of a run with `num_players`.
std::uint64_t iteration_charge(const RunConfig& cfg, int t, int num_players);
bool is_independent_iteration(const RunConfig& cfg, int t);

// Behavior strategies realizing the meta-profile over the policy sets.
Profile materialize(const MarkovGame& game, const EmpiricalGame& eg, const MetaProfile& profile);

// Sum over players of the exact best-response gain.
double nashconv(const MarkovGame& game, std::span<const BehaviorPolicy> profile);
double nashconv(const MarkovGame& game, const MetaProfile& profile, const EmpiricalGame& eg);

struct PerturbationReport {
  struct Row {
    double delta = 0.0;
    int trials = 0;
    int violations = 0;
    double max_gap = 0.0;          // max over trials/players of the BR(sigma~) payoff loss
    double max_measured_delta = 0.0;
    double min_slack = 0.0;        // min of R * Delta - gap
  };
  std::string game;
  double range = 0.0;
  std::vector<Row> rows;
};

// For random profiles sigma and random exploration targets nu, compares the
// exact BR to the perturbed profile against the true BR value. For matrix
// ids every trial draws a fresh matrix with the same dimensions.
PerturbationReport theory_check_perturbation(const GameId& game, int trials,
                                             std::span<const double> deltas, std::uint64_t seed);
void write_report(std::ostream& out, const PerturbationReport& report);

// Output files of one run.
inline constexpr std::string_view kRunCsvHeader =
    "iteration,oracle_kind,nashconv,min_nashconv_so_far,cumulative_br_episodes";
std::string run_csv_header(int num_players);
std::string run_csv_row(const IterationRecord& record);
void write_metadata(std::ostream& out, const RunConfig& cfg, int num_players);

}  // namespace jbr

#endif  // JBR_PSRO_HPP
