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

#ifndef JBR_EXPERIMENT_HPP
#define JBR_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "jbr/psro.hpp"

namespace jbr {

// Malformed spec files or flag values. The CLI maps it to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// A grid of runs: methods x deltas x seeds on one game. Deltas apply only to
// methods with exploration; the others run once per seed.
//
// Spec files hold one `key = value` per line, `#` starts a comment:
//   game = leduc                  kuhn | leduc | matrix:<seed>:<m>x<n>
//   methods = psro, jbr, jbr-dt   see apply_method
//   deltas = 0.1, 0.5             optional, default per exploration kind
//   seeds = 0, 1, 2
//   iterations = 100
//   budget = 10000
//   hybrid_k = 10                 optional, overrides k of every JBR method
//   spi_n_wedge = sweep           or a fixed integer threshold
//   prd_steps = 100000
//   prd_dt = 0.001
//   prd_floor = 1e-10
//   jobs = 1
//   out = results
struct ExperimentSpec {
  GameId game;
  std::vector<std::string> methods{"psro"};
  std::vector<double> deltas;
  std::vector<std::uint64_t> seeds{0};
  int iterations = 100;
  std::uint64_t budget = 10'000;
  std::optional<int> hybrid_k;
  std::int64_t spi_n_wedge = -1;
  PrdOptions prd;
  int jobs = 1;
  std::string out_dir;

  // Throws ConfigError when a config in the grid is invalid.
  std::vector<RunConfig> expand() const;
  void write(std::ostream& out) const;
};

// Sets one key from its text value; throws ConfigError.
void set_spec_key(ExperimentSpec& spec, const std::string& key, const std::string& value);
ExperimentSpec parse_spec(std::istream& in);
ExperimentSpec load_spec(const std::filesystem::path& path);

std::vector<std::string> split_list(const std::string& text);

// File stem of a run inside <out>/runs, e.g. "kuhn_jbr-dt_d0.5_s2".
std::string run_stem(const RunConfig& cfg);

struct ExperimentOutcome {
  int runs = 0;
  int failures = 0;
};

// Executes every run of the grid on `spec.jobs` worker threads, writing
// <out>/runs/<stem>.csv and .json per run, then <out>/summary.csv.
ExperimentOutcome run_experiment(const ExperimentSpec& spec, std::ostream& log);

struct SummaryRow {
  std::string game;
  std::string method;
  double delta = 0.0;
  int runs = 0;
  double median_min_nashconv = 0.0;
  double median_final_nashconv = 0.0;
  std::uint64_t br_episodes = 0;  // per run, median over seeds
};

inline constexpr const char* kSummaryHeader =
    "game,method,delta,runs,median_min_nashconv,median_final_nashconv,br_episodes_per_run";
inline constexpr const char* kDeltaSweepHeader = "series,delta,median_min_nashconv,runs";

// Recomputes the summary from the per-run files under <out>/runs.
std::vector<SummaryRow> summarize(const std::filesystem::path& out_dir);
void write_summary(const std::filesystem::path& file, const std::vector<SummaryRow>& rows);

// Naive JBR plus the chosen exploration kinds over the delta grid; writes
// <out>/delta_sweep.csv (x = delta, y = median min NashConv, series = kind).
ExperimentOutcome run_delta_sweep(ExperimentSpec base, const std::vector<std::string>& kinds,
                                  std::ostream& log);

// Validates header names and column counts of every emitted CSV.
bool schema_check(const std::filesystem::path& out_dir, std::ostream& log);

double median(std::vector<double> values);

}  // namespace jbr

#endif  // JBR_EXPERIMENT_HPP
