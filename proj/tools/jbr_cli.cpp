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

// Command-line front end for PSRO experiments.
//
//   jbr run --spec grid.txt [--seeds 0,1,2] [--jobs 4] [--out results]
//   jbr delta-sweep --game leduc --kind random,targeted --delta 0.05,0.1,0.2
//   jbr theory-check --game kuhn --trials 100 --delta 0.1,0.5
//   jbr schema-check --out results
//   jbr show-config --spec grid.txt

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "jbr/experiment.hpp"
#include "jbr/psro.hpp"

namespace {

constexpr int kExitRunFailure = 1;
constexpr int kExitConfigError = 2;

// Flags shared by the subcommands that build an ExperimentSpec.
struct Overrides {
  std::string spec;
  std::string out;
  std::string seeds;
  std::string game;
  std::string method;
  std::string delta;
  std::string budget;
  std::string iterations;
  std::string hybrid_k;
  int jobs = 0;

  void attach(CLI::App* cmd, bool with_method) {
    cmd->add_option("--spec", spec, "key = value spec file");
    cmd->add_option("--out", out, "output directory (default $JBR_OUT_DIR or ./jbr_out)");
    cmd->add_option("--seeds", seeds, "comma-separated seeds");
    cmd->add_option("--jobs", jobs, "worker threads");
    cmd->add_option("--game", game, "kuhn, leduc or matrix:<seed>:<m>x<n>");
    if (with_method) cmd->add_option("--method", method, "comma-separated method labels");
    cmd->add_option("--delta", delta, "comma-separated exploration rates");
    cmd->add_option("--budget", budget, "BR episodes per iteration");
    cmd->add_option("--iterations", iterations, "PSRO iterations");
    if (with_method) cmd->add_option("--hybrid-k", hybrid_k, "IBR period for JBR methods (0 = never)");
  }

  jbr::ExperimentSpec build() const {
    jbr::ExperimentSpec spec = this->spec.empty() ? jbr::ExperimentSpec{} : jbr::load_spec(this->spec);
    auto set = [&spec](const char* key, const std::string& value) {
      if (!value.empty()) jbr::set_spec_key(spec, key, value);
    };
    set("game", game);
    set("methods", method);
    set("deltas", delta);
    set("seeds", seeds);
    set("budget", budget);
    set("iterations", iterations);
    set("hybrid_k", hybrid_k);
    if (jobs != 0) set("jobs", std::to_string(jobs));
    if (!out.empty()) {
      spec.out_dir = out;
    } else if (spec.out_dir.empty()) {
      const char* env = std::getenv("JBR_OUT_DIR");
      spec.out_dir = env != nullptr && *env != '\0' ? env : "jbr_out";
    }
    return spec;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"PSRO with joint-experience best responses"};
  app.require_subcommand(1);

  Overrides run_flags, sweep_flags, show_flags;
  auto* run = app.add_subcommand("run", "execute every run of a spec grid");
  run_flags.attach(run, true);

  auto* sweep = app.add_subcommand("delta-sweep", "naive JBR against exploration over a delta grid");
  sweep_flags.attach(sweep, false);
  std::string kinds = "random,targeted";
  sweep->add_option("--kind", kinds, "random, targeted or both (comma-separated)");

  auto* theory = app.add_subcommand("theory-check", "perturbation bound check with exact BRs");
  std::string theory_game = "kuhn", theory_deltas = "0.1,0.5", theory_out;
  int trials = 100;
  std::uint64_t theory_seed = 0;
  theory->add_option("--game", theory_game, "kuhn or matrix:<seed>:<m>x<n> (fresh matrix per trial)");
  theory->add_option("--trials", trials, "random profiles per delta");
  theory->add_option("--delta", theory_deltas, "comma-separated exploration rates");
  theory->add_option("--seeds", theory_seed, "seed of the trial stream");
  theory->add_option("--out", theory_out, "output directory (default $JBR_OUT_DIR or ./jbr_out)");

  auto* schema = app.add_subcommand("schema-check", "validate emitted CSV files");
  std::string schema_out;
  schema->add_option("--out", schema_out, "output directory to check");

  auto* show = app.add_subcommand("show-config", "print the parsed spec and its expanded runs");
  show_flags.attach(show, true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfigError;
  }

  auto default_out = [](const std::string& out) {
    if (!out.empty()) return out;
    const char* env = std::getenv("JBR_OUT_DIR");
    return std::string(env != nullptr && *env != '\0' ? env : "jbr_out");
  };

  try {
    if (*run) {
      const auto outcome = jbr::run_experiment(run_flags.build(), std::cout);
      std::cout << outcome.runs - outcome.failures << "/" << outcome.runs << " runs succeeded\n";
      return outcome.failures == 0 ? 0 : kExitRunFailure;
    }
    if (*sweep) {
      auto spec = sweep_flags.build();
      if (sweep_flags.delta.empty() && spec.deltas.empty()) spec.deltas = {0.05, 0.1, 0.2, 0.4, 0.6};
      const auto outcome = jbr::run_delta_sweep(spec, jbr::split_list(kinds), std::cout);
      std::cout << "plot data: " << spec.out_dir << "/delta_sweep.csv\n";
      return outcome.failures == 0 ? 0 : kExitRunFailure;
    }
    if (*theory) {
      std::vector<double> deltas;
      for (const auto& d : jbr::split_list(theory_deltas)) deltas.push_back(std::stod(d));
      const auto game = jbr::GameId::parse(theory_game);
      const auto report = jbr::theory_check_perturbation(game, trials, deltas, theory_seed);
      const std::filesystem::path dir = default_out(theory_out);
      std::filesystem::create_directories(dir);
      std::ofstream file(dir / "theory_check.txt");
      jbr::write_report(file, report);
      jbr::write_report(std::cout, report);
      int violations = 0;
      for (const auto& row : report.rows) violations += row.violations;
      return violations == 0 ? 0 : kExitRunFailure;
    }
    if (*schema) {
      return jbr::schema_check(default_out(schema_out), std::cout) ? 0 : kExitRunFailure;
    }
    if (*show) {
      const auto spec = show_flags.build();
      spec.write(std::cout);
      for (const auto& cfg : spec.expand()) std::cout << "run " << jbr::run_stem(cfg) << '\n';
      return 0;
    }
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitRunFailure;
  }
  return 0;
}
