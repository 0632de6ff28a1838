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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails. Arguments select a subset of
// criteria by number; the default is all of them.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "jbr/dataset.hpp"
#include "jbr/evaluation.hpp"
#include "jbr/experiment.hpp"
#include "jbr/games.hpp"
#include "jbr/induced_mdp.hpp"
#include "jbr/meta_solver.hpp"
#include "jbr/oracles.hpp"
#include "jbr/psro.hpp"

namespace fs = std::filesystem;
using namespace jbr;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

fs::path output_root() {
  const char* env = std::getenv("JBR_ACCEPTANCE_OUT");
  return env != nullptr && *env != '\0' ? fs::path(env) : fs::path("acceptance_out");
}

int worker_count() {
  return std::max(1, static_cast<int>(std::thread::hardware_concurrency()));
}

// Runs a grid once per process and returns its summary keyed by "method@delta".
class Grids {
 public:
  std::map<std::string, SummaryRow> run(const std::string& name, ExperimentSpec spec) {
    spec.out_dir = (output_root() / name).string();
    fs::remove_all(spec.out_dir);
    std::ostringstream log;
    const auto outcome = run_experiment(spec, log);
    if (outcome.failures != 0) throw std::runtime_error(name + ": " + log.str());
    std::map<std::string, SummaryRow> rows;
    for (const auto& row : summarize(spec.out_dir)) rows[key(row.method, row.delta)] = row;
    return rows;
  }

  static std::string key(const std::string& method, double delta) {
    return method + "@" + fmt("%g", delta);
  }
};

ExperimentSpec standard_protocol(const std::string& game, std::vector<std::string> methods) {
  ExperimentSpec spec;
  spec.game = GameId::parse(game);
  spec.methods = std::move(methods);
  spec.seeds = {0, 1, 2};
  spec.iterations = 100;
  spec.budget = 10'000;
  spec.jobs = worker_count();
  return spec;
}

Rng profile_rng(std::uint64_t seed) { return Rng(derive_seed(0xacce55, seed)); }

Profile random_profile(const MarkovGame& game, std::uint64_t seed) {
  Rng rng = profile_rng(seed);
  Profile out;
  for (int p = 0; p < game.num_players(); ++p) out.push_back(BehaviorPolicy::random(game, p, rng));
  return out;
}

double value_against(const MarkovGame& game, Profile profile, int player, const BehaviorPolicy& policy) {
  profile[static_cast<std::size_t>(player)] = policy;
  return expected_payoff(game, profile)[static_cast<std::size_t>(player)];
}

// ---------------------------------------------------------------------------

Verdict oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  const auto game = build_kuhn();
  double worst = 0.0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto profile = random_profile(game, s);
    for (int p = 0; p < 2; ++p) {
      const auto induced = induce(game, p, profile);
      const double vi = induced.start_value(value_iteration(induced.mdp).value);
      worst = std::max(worst, std::abs(vi - exact_best_response(game, p, profile).value));
    }
  }
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {worst <= 1e-9 && seconds < 10.0,
          fmt("max |VI - exact BR| = %.3g over 10 profiles x 2 players, %.2f s", worst, seconds)};
}

Verdict kuhn_feasibility(Grids& grids) {
  const auto rows = grids.run("kuhn_feasibility", standard_protocol("kuhn", {"psro", "jbr"}));
  const double psro = rows.at(Grids::key("psro", 0)).median_min_nashconv;
  const double jbr = rows.at(Grids::key("jbr", 0)).median_min_nashconv;
  const bool pass = jbr <= 2.0 * psro && psro < 0.1 && jbr < 0.1;
  return {pass, fmt("median min NashConv psro %.4g, jbr %.4g (ratio %.3g; need <= 2 and both < 0.1)", psro,
                    jbr, jbr / psro)};
}

struct LeducResults {
  std::map<std::string, SummaryRow> main;
  std::map<std::string, SummaryRow> sweep;
};

Verdict leduc_ordering(const LeducResults& r) {
  auto med = [&](const std::string& method, double delta) {
    return r.main.at(Grids::key(method, delta)).median_min_nashconv;
  };
  const double psro = med("psro", 0), hbr = med("hbr10-dt", 0.5), dt = med("jbr-dt", 0.5);
  const double dr = med("jbr-dr", 0.1), naive = med("jbr", 0);
  const bool order = psro <= hbr && hbr <= dt && dt <= dr && dr <= naive;
  const bool ratio = naive >= 2.0 * psro;
  return {order && ratio,
          fmt("psro %.4g <= hbr10-dt %.4g <= jbr-dt %.4g <= jbr-dr %.4g <= jbr %.4g: %s; jbr/psro = %.3g (need >= 2)",
              psro, hbr, dt, dr, naive, order ? "holds" : "violated", naive / psro)};
}

// Walks every run CSV under `dir` and compares the final cumulative episode
// count with the closed form for the run's schedule.
Verdict sample_ledger(const std::vector<fs::path>& dirs) {
  int checked = 0, wrong = 0;
  std::string first_bad;
  for (const auto& dir : dirs) {
    for (const auto& entry : fs::directory_iterator(dir / "runs")) {
      if (entry.path().extension() != ".json") continue;
      std::ifstream meta_in(entry.path());
      const auto meta = nlohmann::json::parse(meta_in);
      RunConfig cfg;
      apply_method(cfg, meta.at("method").get<std::string>());
      cfg.iterations = meta.at("iterations").get<int>();
      cfg.budget = meta.at("budget").get<std::uint64_t>();
      const std::uint64_t T = static_cast<std::uint64_t>(cfg.iterations), B = cfg.budget, n = 2;
      std::uint64_t expected = 0;
      if (cfg.mode == OracleMode::kIndependent) {
        expected = n * T * B;
      } else if (cfg.hybrid_k == 0) {
        expected = T * B;
      } else {
        const std::uint64_t ibr = T / static_cast<std::uint64_t>(cfg.hybrid_k);
        expected = T * B + ibr * B * (n - 1);
      }
      auto csv = entry.path();
      csv.replace_extension(".csv");
      std::ifstream in(csv);
      std::string line, last;
      while (std::getline(in, line)) last = line;
      std::vector<std::string> cells;
      std::stringstream ss(last);
      for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
      const std::uint64_t got = std::stoull(cells.at(4));
      ++checked;
      if (got != expected) {
        ++wrong;
        if (first_bad.empty()) first_bad = csv.filename().string() + " " + std::to_string(got) + " vs " + std::to_string(expected);
      }
    }
  }
  return {checked > 0 && wrong == 0,
          fmt("%d runs checked against n*T*B, T*B and T*B + floor(T/k)*B*(n-1); %d mismatches%s%s", checked, wrong,
              first_bad.empty() ? "" : ": ", first_bad.c_str())};
}

Verdict spi_safety() {
  const auto game = build_kuhn();
  double worst_margin = 1e9;
  int pinned_violations = 0, min_count = 1 << 30;
  const std::int64_t n_wedge = 50;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const auto profile = random_profile(game, 100 + s);
    const auto data = collect(game, profile, 50'000, derive_seed(7, s));
    for (int p = 0; p < 2; ++p) {
      for (int info = 0; info < game.num_infostates(p); ++info) {
        for (int a = 0; a < 2; ++a) min_count = std::min<int>(min_count, static_cast<int>(data.count(p, info, a)));
      }
      const auto& base = profile[static_cast<std::size_t>(p)];
      for (std::int64_t n : {std::int64_t{0}, std::int64_t{10}, n_wedge, std::int64_t{5000}}) {
        const auto spi = spi_jbr(data, game, p, SpiConfig{n, base});
        worst_margin = std::min(worst_margin, value_against(game, profile, p, spi.policy) -
                                                  value_against(game, profile, p, base));
        const auto uncertain = uncertain_pairs(estimate_model(data, game, p), game, n);
        for (int info = 0; info < game.num_infostates(p); ++info) {
          for (int a = 0; a < 2; ++a) {
            if (uncertain[static_cast<std::size_t>(info)][static_cast<std::size_t>(a)] &&
                spi.policy.probs(info)[a] != base.probs(info)[a]) {
              ++pinned_violations;
            }
          }
        }
      }
    }
  }
  return {worst_margin >= -0.05 && pinned_violations == 0,
          fmt("min u(SPI) - u(baseline) = %.4g (need >= -0.05), min pair count %d, pinned-mass violations %d",
              worst_margin, min_count, pinned_violations)};
}

Verdict perturbation_bound() {
  const std::vector<double> deltas{0.1, 0.5};
  const auto matrix = theory_check_perturbation(GameId::parse("matrix:0:2x2"), 1000, deltas, 2024);
  const auto kuhn = theory_check_perturbation(GameId::parse("kuhn"), 100, deltas, 2024);
  int violations = 0;
  bool delta_ok = true;
  double min_slack = 1e9;
  for (const auto* report : {&matrix, &kuhn}) {
    for (const auto& row : report->rows) {
      violations += row.violations;
      delta_ok = delta_ok && row.max_measured_delta <= 2.0 * row.delta + 1e-12;
      min_slack = std::min(min_slack, row.min_slack);
    }
  }
  return {violations == 0 && delta_ok,
          fmt("1000 matrix + 100 kuhn trials per delta in {0.1, 0.5}: %d violations, measured Delta <= 2 delta: %s, "
              "min slack %.4g",
              violations, delta_ok ? "yes" : "no", min_slack)};
}

Verdict delta_sweep_shape(const LeducResults& r) {
  auto med = [&](const std::string& method, double delta) {
    const auto key = Grids::key(method, delta);
    const auto it = r.sweep.find(key);
    return (it != r.sweep.end() ? it->second : r.main.at(key)).median_min_nashconv;
  };
  const double naive = med("jbr", 0);
  const std::vector<double> random_grid{0.05, 0.1, 0.2, 0.4, 0.6};
  const std::vector<double> targeted_grid{0.1, 0.2, 0.3, 0.4, 0.5};
  double best = 1e9, best_delta = -1;
  std::string random_text, targeted_text;
  for (double d : random_grid) {
    const double v = med("jbr-dr", d);
    random_text += fmt(" %g:%.4g", d, v);
    if (v < best) best = v, best_delta = d;
  }
  bool targeted_beats = true;
  for (double d : targeted_grid) {
    const double v = med("jbr-dt", d);
    targeted_text += fmt(" %g:%.4g", d, v);
    targeted_beats = targeted_beats && v < naive;
  }
  const bool best_small = best_delta <= 0.2;
  const bool large_worse = med("jbr-dr", 0.6) > naive;
  return {best_small && large_worse && targeted_beats,
          fmt("naive %.4g; random%s (best at %g: %s; 0.6 worse than naive: %s); targeted%s (all better than naive: %s)",
              naive, random_text.c_str(), best_delta, best_small ? "ok" : "no", large_worse ? "yes" : "no",
              targeted_text.c_str(), targeted_beats ? "yes" : "no")};
}

Verdict prd_sanity() {
  const auto pennies_game = make_matrix_game({{1, -1}, {-1, 1}});
  auto square = [](const MarkovGame& game, int n) {
    EmpiricalGame eg(2);
    for (int k = 0; k < n; ++k) {
      const std::vector<int> a{k};
      const Profile next{BehaviorPolicy::pure(game, 0, a), BehaviorPolicy::pure(game, 1, a)};
      eg.extend(next, game);
    }
    return eg;
  };
  const auto pennies = projected_replicator_dynamics(square(pennies_game, 2));
  double linf = 0.0;
  for (const auto& x : pennies) {
    for (double v : x) linf = std::max(linf, std::abs(v - 0.5));
  }
  double worst = 0.0;
  std::vector<double> regrets;
  for (std::uint64_t s = 0; s < 20; ++s) {
    const auto game = make_matrix_game(random_matrix(s, 3, 3));
    const auto eg = square(game, 3);
    regrets.push_back(restricted_regret(eg, projected_replicator_dynamics(eg)));
    worst = std::max(worst, regrets.back());
  }
  // The regret bound is the median over tensors at the default horizon.
  const double mid = median(regrets);
  return {linf <= 0.05 && mid <= 0.05,
          fmt("matching pennies L-inf distance %.3g; restricted regret over 20 random 3x3: median %.3g "
              "(need <= 0.05), max %.3g",
              linf, mid, worst)};
}

Verdict determinism() {
  ExperimentSpec spec;
  spec.game = GameId::parse("kuhn");
  spec.methods = {"psro", "jbr-dt", "hbr3-dr", "jbr-spi"};
  spec.seeds = {5};
  spec.iterations = 8;
  spec.budget = 2000;
  spec.jobs = worker_count();
  const fs::path a = output_root() / "determinism_a", b = output_root() / "determinism_b";
  for (const auto& dir : {a, b}) {
    fs::remove_all(dir);
    spec.out_dir = dir.string();
    std::ostringstream log;
    if (run_experiment(spec, log).failures != 0) return {false, "a run failed: " + log.str()};
  }
  int files = 0, differing = 0;
  for (const auto& entry : fs::directory_iterator(a / "runs")) {
    if (entry.path().extension() != ".csv") continue;
    ++files;
    auto metrics = [](const fs::path& p) {
      std::ifstream in(p);
      std::string out;
      for (std::string line; std::getline(in, line);) out += line.substr(0, line.rfind(',')) + "\n";
      return out;
    };
    if (metrics(entry.path()) != metrics(b / "runs" / entry.path().filename())) ++differing;
  }
  return {files == 4 && differing == 0,
          fmt("%d run CSVs compared across two executions, %d differ in metric columns", files, differing)};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int k = 1; k < argc; ++k) selected.insert(std::atoi(argv[k]));
  auto wanted = [&](int c) { return selected.empty() || selected.count(c) != 0; };
  fs::create_directories(output_root());

  Grids grids;
  LeducResults leduc;
  bool leduc_ready = false;
  auto need_leduc = [&] {
    if (leduc_ready) return;
    leduc.main = grids.run("leduc_ordering",
                           standard_protocol("leduc", {"psro", "hbr10-dt", "jbr-dt", "jbr-dr", "jbr"}));
    leduc_ready = true;
  };

  const std::vector<std::pair<int, std::string>> names{
      {1, "oracle equivalence on kuhn"},       {2, "kuhn feasibility"},
      {3, "leduc ordering"},                   {4, "sample-efficiency ledger"},
      {5, "SPI safety"},                       {6, "perturbation bound"},
      {7, "delta-sweep shape"},                {8, "PRD sanity"},
      {9, "end-to-end determinism"}};

  int failures = 0;
  for (const auto& [id, name] : names) {
    if (!wanted(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      switch (id) {
        case 1: v = oracle_equivalence(); break;
        case 2: v = kuhn_feasibility(grids); break;
        case 3: need_leduc(); v = leduc_ordering(leduc); break;
        case 4: {
          need_leduc();
          if (!fs::exists(output_root() / "kuhn_feasibility" / "runs")) kuhn_feasibility(grids);
          v = sample_ledger({output_root() / "kuhn_feasibility", output_root() / "leduc_ordering"});
          break;
        }
        case 5: v = spi_safety(); break;
        case 6: v = perturbation_bound(); break;
        case 7: {
          need_leduc();
          auto spec = standard_protocol("leduc", {"jbr-dr"});
          spec.deltas = {0.05, 0.2, 0.4, 0.6};
          leduc.sweep = grids.run("leduc_sweep_random", spec);
          spec.methods = {"jbr-dt"};
          spec.deltas = {0.1, 0.2, 0.3, 0.4};
          for (auto& [k, row] : grids.run("leduc_sweep_targeted", spec)) leduc.sweep[k] = row;
          v = delta_sweep_shape(leduc);
          break;
        }
        case 8: v = prd_sanity(); break;
        case 9: v = determinism(); break;
      }
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cout << "criterion " << id << " (" << name << "): " << (v.pass ? "PASS" : "FAIL") << " - " << v.detail
              << fmt(" [%.0f s]", seconds) << std::endl;
    if (!v.pass) ++failures;
  }
  return failures == 0 ? 0 : 1;
}
