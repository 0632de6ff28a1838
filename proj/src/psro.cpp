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

#include "jbr/psro.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "jbr/evaluation.hpp"
#include "jbr/games.hpp"
#include "jbr/induced_mdp.hpp"
#include "jbr/rng.hpp"
#include "jbr/version.hpp"

namespace jbr {

void RunConfig::validate() const {
  if (iterations < 1) throw std::invalid_argument("iterations must be >= 1");
  if (budget < 1) throw std::invalid_argument("budget must be >= 1");
  if (hybrid_k < 0) throw std::invalid_argument("hybrid_k must be >= 0");
  const double d = effective_delta();
  if (!(d >= 0.0 && d <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
  if (mode == OracleMode::kIndependent && exploration != ExplorationKind::kNone) {
    throw std::invalid_argument("exploration applies to JBR oracles only");
  }
  if (spi_n_wedge > kSpiSweepMax * 1'000'000) throw std::invalid_argument("spi_n_wedge too large");
  if (prd.steps < 1 || !(prd.dt > 0.0) || prd.floor < 0.0) {
    throw std::invalid_argument("bad PRD parameters");
  }
}

double RunConfig::effective_delta() const {
  if (exploration == ExplorationKind::kNone) return 0.0;
  if (delta >= 0.0) return delta;
  return exploration == ExplorationKind::kRandom ? kDefaultRandomDelta : kDefaultTargetedDelta;
}

std::string RunConfig::method() const {
  std::string label;
  if (mode == OracleMode::kIndependent) return "psro";
  label = hybrid_k > 0 ? "hbr" + std::to_string(hybrid_k) : "jbr";
  if (mode == OracleMode::kSpiJbr) label += "-spi";
  if (exploration == ExplorationKind::kRandom) label += "-dr";
  if (exploration == ExplorationKind::kTargeted) label += "-dt";
  return label;
}

void apply_method(RunConfig& cfg, std::string_view label) {
  const std::string original(label);
  auto fail = [&] { throw std::invalid_argument("unknown method '" + original + "'"); };
  cfg.exploration = ExplorationKind::kNone;
  cfg.hybrid_k = 0;
  if (label == "psro") {
    cfg.mode = OracleMode::kIndependent;
    return;
  }
  if (label.starts_with("jbr")) {
    label.remove_prefix(3);
  } else if (label.starts_with("hbr")) {
    label.remove_prefix(3);
    int k = 0;
    std::size_t used = 0;
    while (used < label.size() && label[used] >= '0' && label[used] <= '9') {
      k = k * 10 + (label[used] - '0');
      if (k > 1'000'000) fail();
      ++used;
    }
    if (used == 0 || k < 1) fail();
    cfg.hybrid_k = k;
    label.remove_prefix(used);
  } else {
    fail();
  }
  cfg.mode = OracleMode::kNaiveJbr;
  if (label.starts_with("-spi")) {
    cfg.mode = OracleMode::kSpiJbr;
    label.remove_prefix(4);
  }
  if (label == "-dr") {
    cfg.exploration = ExplorationKind::kRandom;
  } else if (label == "-dt") {
    cfg.exploration = ExplorationKind::kTargeted;
  } else if (!label.empty()) {
    fail();
  }
}

bool is_independent_iteration(const RunConfig& cfg, int t) {
  return cfg.mode == OracleMode::kIndependent || (cfg.hybrid_k > 0 && t % cfg.hybrid_k == 0);
}

std::uint64_t iteration_charge(const RunConfig& cfg, int t, int num_players) {
  return is_independent_iteration(cfg, t) ? cfg.budget * static_cast<std::uint64_t>(num_players)
                                          : cfg.budget;
}

Profile materialize(const MarkovGame& game, const EmpiricalGame& eg, const MetaProfile& profile) {
  Profile out;
  for (int p = 0; p < eg.num_players(); ++p) {
    out.push_back(to_behavior(game, eg.policies(p), profile[static_cast<std::size_t>(p)]));
  }
  return out;
}

double nashconv(const MarkovGame& game, std::span<const BehaviorPolicy> profile) {
  const auto values = expected_payoff(game, profile);
  double total = 0.0;
  for (int p = 0; p < game.num_players(); ++p) {
    total += exact_best_response(game, p, profile).value - values[static_cast<std::size_t>(p)];
  }
  return total;
}

double nashconv(const MarkovGame& game, const MetaProfile& profile, const EmpiricalGame& eg) {
  return nashconv(game, materialize(game, eg, profile));
}

namespace {

double value_against(const MarkovGame& game, std::span<const BehaviorPolicy> profile, int player,
                     const BehaviorPolicy& policy) {
  Profile with(profile.begin(), profile.end());
  with[static_cast<std::size_t>(player)] = policy;
  return expected_payoff(game, with)[static_cast<std::size_t>(player)];
}

// Candidate with the best exact value over N = 0..kSpiSweepMax, lowest N on
// ties. Identical policies are evaluated once.
BrResult spi_sweep(const EstimatedModel& model, const MarkovGame& game,
                   std::span<const BehaviorPolicy> behavior, int player) {
  const auto& baseline = behavior[static_cast<std::size_t>(player)];
  std::map<std::uint64_t, double> seen;
  BrResult best;
  double best_value = -std::numeric_limits<double>::infinity();
  for (std::int64_t n = 0; n <= kSpiSweepMax; ++n) {
    auto candidate = spi_jbr(model, game, SpiConfig{n, baseline});
    const auto key = candidate.policy.hash();
    auto it = seen.find(key);
    const double value = it != seen.end()
                             ? it->second
                             : seen.emplace(key, value_against(game, behavior, player, candidate.policy))
                                   .first->second;
    if (value > best_value) {
      best_value = value;
      best = std::move(candidate);
    }
  }
  return best;
}

}  // namespace

RunResult run_psro(const RunConfig& cfg, const RecordSink& sink) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const MarkovGame game = build_game(cfg.game, cfg.node_budget);
  const int n = game.num_players();

  RunResult result;
  result.empirical_game = EmpiricalGame(n);
  result.empirical_game.extend(uniform_profile(game), game);
  result.meta_profile = projected_replicator_dynamics(result.empirical_game, cfg.prd);

  Profile previous_br;
  std::uint64_t episodes = 0;
  double best = std::numeric_limits<double>::infinity();
  for (int t = 1; t <= cfg.iterations; ++t) {
    const Profile behavior = materialize(game, result.empirical_game, result.meta_profile);
    const std::uint64_t stream = derive_seed(cfg.seed, static_cast<std::uint64_t>(t));
    Profile responses;
    IterationRecord record;
    record.iteration = t;

    if (is_independent_iteration(cfg, t)) {
      record.kind = OracleKind::kIndependent;
      for (int p = 0; p < n; ++p) {
        auto br = independent_br(game, p, behavior, cfg.budget,
                                 derive_seed(stream, static_cast<std::uint64_t>(p) + 1));
        responses.push_back(std::move(br.policy));
      }
    } else {
      ExplorationSpec spec;
      spec.kind = cfg.exploration;
      spec.delta = cfg.effective_delta();
      if (spec.kind == ExplorationKind::kTargeted) {
        if (previous_br.empty()) {
          spec.kind = ExplorationKind::kNone;
          spec.delta = 0.0;
        } else {
          spec.targeted = previous_br;
        }
      }
      const Profile collection = perturb(behavior, spec, game);
      const CollectionTag tag{profile_hash(behavior), spec.delta, spec.kind};
      const JointDataset data = collect(game, collection, cfg.budget, derive_seed(stream, 0), tag);
      ++result.collect_calls;
      for (int p = 0; p < n; ++p) {
        const auto model = estimate_model(data, game, p);
        const auto& baseline = behavior[static_cast<std::size_t>(p)];
        BrResult br;
        if (cfg.mode == OracleMode::kNaiveJbr) {
          br = naive_jbr(model, game, baseline);
        } else if (cfg.spi_n_wedge >= 0) {
          br = spi_jbr(model, game, SpiConfig{cfg.spi_n_wedge, baseline});
        } else {
          br = spi_sweep(model, game, behavior, p);
        }
        record.kind = br.kind;
        responses.push_back(std::move(br.policy));
      }
    }
    episodes += iteration_charge(cfg, t, n);

    for (int p = 0; p < n; ++p) {
      record.br_values.push_back(
          value_against(game, behavior, p, responses[static_cast<std::size_t>(p)]));
    }
    result.empirical_game.extend(responses, game);
    result.meta_profile = projected_replicator_dynamics(result.empirical_game, cfg.prd);
    previous_br = std::move(responses);

    record.nashconv = nashconv(game, result.meta_profile, result.empirical_game);
    best = std::min(best, record.nashconv);
    record.min_nashconv = best;
    record.cumulative_episodes = episodes;
    record.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (sink) sink(record);
    result.records.push_back(std::move(record));
  }
  return result;
}

// ---------------------------------------------------------------------------
// Perturbation bound check

PerturbationReport theory_check_perturbation(const GameId& id, int trials,
                                             std::span<const double> deltas, std::uint64_t seed) {
  if (trials < 0) throw std::invalid_argument("trials must be >= 0");
  PerturbationReport report;
  report.game = id.to_string();
  const bool fresh_matrix = id.kind == GameKind::kMatrix;
  const MarkovGame fixed = build_game(id);
  report.range = fixed.payoff_bounds().range();

  for (std::size_t d = 0; d < deltas.size(); ++d) {
    const double delta = deltas[d];
    if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
    PerturbationReport::Row row;
    row.delta = delta;
    row.trials = trials;
    row.min_slack = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < trials; ++trial) {
      const std::uint64_t stream = derive_seed(derive_seed(seed, d), static_cast<std::uint64_t>(trial));
      GameId trial_id = id;
      if (fresh_matrix) trial_id.seed = derive_seed(stream, 1);
      const MarkovGame built = fresh_matrix ? build_game(trial_id) : MarkovGame{};
      const MarkovGame& game = fresh_matrix ? built : fixed;
      const double range = game.payoff_bounds().range();

      Rng rng(stream);
      Profile sigma, nu;
      for (int p = 0; p < game.num_players(); ++p) sigma.push_back(BehaviorPolicy::random(game, p, rng));
      for (int p = 0; p < game.num_players(); ++p) nu.push_back(BehaviorPolicy::random(game, p, rng));
      ExplorationSpec spec{delta, ExplorationKind::kTargeted, nu};
      const Profile perturbed = perturb(sigma, spec, game);

      for (int p = 0; p < game.num_players(); ++p) {
        double measured = 0.0;
        for (int q = 0; q < game.num_players(); ++q) {
          if (q != p) {
            measured = std::max(measured, max_l1_distance(sigma[static_cast<std::size_t>(q)],
                                                          perturbed[static_cast<std::size_t>(q)]));
          }
        }
        const double best = exact_best_response(game, p, sigma).value;
        const auto response = exact_best_response(game, p, perturbed).policy;
        const double gap = best - value_against(game, sigma, p, response);
        const double slack = range * measured - gap;
        row.max_gap = std::max(row.max_gap, gap);
        row.max_measured_delta = std::max(row.max_measured_delta, measured);
        row.min_slack = std::min(row.min_slack, slack);
        if (slack < -1e-9) ++row.violations;
      }
    }
    if (trials == 0) row.min_slack = 0.0;
    report.rows.push_back(row);
  }
  return report;
}

void write_report(std::ostream& out, const PerturbationReport& report) {
  out << "perturbation bound check: " << report.game << " (payoff range R = " << report.range
      << ")\n";
  out << "delta trials violations max_gap max_measured_Delta bound_2delta min_slack\n";
  char line[256];
  for (const auto& row : report.rows) {
    std::snprintf(line, sizeof line, "%g %d %d %.9g %.9g %.9g %.9g\n", row.delta, row.trials,
                  row.violations, row.max_gap, row.max_measured_delta, 2.0 * row.delta,
                  row.min_slack);
    out << line;
  }
}

// ---------------------------------------------------------------------------
// Output files

std::string run_csv_header(int num_players) {
  std::string header(kRunCsvHeader);
  for (int p = 0; p < num_players; ++p) header += ",br_value_p" + std::to_string(p);
  return header + ",wall_time_s";
}

std::string run_csv_row(const IterationRecord& r) {
  char buf[64];
  std::string row = std::to_string(r.iteration) + "," + to_string(r.kind);
  auto add = [&](double v) {
    std::snprintf(buf, sizeof buf, ",%.17g", v);
    row += buf;
  };
  add(r.nashconv);
  add(r.min_nashconv);
  row += "," + std::to_string(r.cumulative_episodes);
  for (double v : r.br_values) add(v);
  std::snprintf(buf, sizeof buf, ",%.3f", r.wall_time_s);
  return row + buf;
}

void write_metadata(std::ostream& out, const RunConfig& cfg, int num_players) {
  nlohmann::ordered_json j;
  j["game"] = cfg.game.to_string();
  j["method"] = cfg.method();
  j["iterations"] = cfg.iterations;
  j["oracle_mode"] = cfg.mode == OracleMode::kIndependent ? "ibr"
                     : cfg.mode == OracleMode::kNaiveJbr  ? "jbr"
                                                          : "jbr-spi";
  j["budget"] = cfg.budget;
  j["exploration"] = to_string(cfg.exploration);
  j["delta"] = cfg.effective_delta();
  j["spi_n_wedge"] = cfg.spi_n_wedge < 0 ? nlohmann::ordered_json("sweep:0.." + std::to_string(kSpiSweepMax))
                                         : nlohmann::ordered_json(cfg.spi_n_wedge);
  j["hybrid_k"] = cfg.hybrid_k;
  j["seed"] = cfg.seed;
  j["num_players"] = num_players;
  j["prd"] = {{"steps", cfg.prd.steps},
              {"dt", cfg.prd.dt},
              {"floor", cfg.prd.floor},
              {"readout", "mean of second half of trajectory"}};
  j["payoff_evaluation"] = "exact";
  j["initial_policies"] = "uniform";
  j["library_version"] = std::string(kVersion);
  j["csv_columns"] = run_csv_header(num_players);
  out << j.dump(2) << '\n';
}

}  // namespace jbr
