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

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>
#include <string>
#include <vector>

#include "jbr/evaluation.hpp"
#include "jbr/games.hpp"
#include "jbr/meta_solver.hpp"
#include "jbr/oracles.hpp"
#include "jbr/psro.hpp"
#include "jbr/version.hpp"

namespace py = pybind11;

namespace {

using Table = std::vector<std::vector<double>>;

std::vector<jbr::BehaviorPolicy> to_profile(const jbr::MarkovGame& game,
                                            const std::vector<Table>& tables) {
  if (static_cast<int>(tables.size()) != game.num_players()) {
    throw std::invalid_argument("profile needs one policy table per player");
  }
  std::vector<jbr::BehaviorPolicy> profile;
  for (int p = 0; p < game.num_players(); ++p) {
    profile.emplace_back(p, tables[static_cast<std::size_t>(p)]);
    profile.back().validate(game);
  }
  return profile;
}

std::vector<Table> uniform_profile(const jbr::MarkovGame& game) {
  std::vector<Table> out;
  for (int p = 0; p < game.num_players(); ++p) {
    out.push_back(jbr::BehaviorPolicy::uniform(game, p).table());
  }
  return out;
}

std::vector<std::string> infostate_keys(const jbr::MarkovGame& game, int player) {
  std::vector<std::string> keys;
  for (int i = 0; i < game.num_infostates(player); ++i) keys.push_back(game.infostate(player, i).key);
  return keys;
}

py::dict best_response(const jbr::MarkovGame& game, int player, const std::vector<Table>& tables) {
  const auto profile = to_profile(game, tables);
  const auto br = jbr::exact_best_response(game, player, profile);
  py::dict out;
  out["policy"] = br.policy.table();
  out["value"] = br.value;
  return out;
}

// PRD on a two-player matrix game given by the row player's payoffs.
jbr::MetaProfile prd_matrix(const Table& payoffs, int steps, double dt, double floor) {
  const auto game = jbr::make_matrix_game(payoffs);
  jbr::EmpiricalGame eg(2);
  const int rows = static_cast<int>(payoffs.size());
  const int cols = rows == 0 ? 0 : static_cast<int>(payoffs.front().size());
  for (int k = 0; k < std::max(rows, cols); ++k) {
    std::vector<jbr::BehaviorPolicy> fresh;
    for (int p = 0; p < 2; ++p) {
      const int a = std::min(k, (p == 0 ? rows : cols) - 1);
      fresh.push_back(jbr::BehaviorPolicy::pure(game, p, std::vector<int>{a}));
    }
    eg.extend(fresh, game);
  }
  return jbr::projected_replicator_dynamics(eg, jbr::PrdOptions{steps, dt, floor});
}

py::dict run(const std::string& game, const std::string& method, int iterations,
             std::uint64_t budget, std::uint64_t seed, double delta, int prd_steps) {
  jbr::RunConfig cfg;
  cfg.game = jbr::GameId::parse(game);
  cfg.iterations = iterations;
  cfg.budget = budget;
  cfg.seed = seed;
  cfg.delta = delta;
  cfg.prd.steps = prd_steps;
  jbr::apply_method(cfg, method);
  cfg.validate();
  jbr::RunResult result;
  {
    py::gil_scoped_release release;
    result = jbr::run_psro(cfg);
  }
  py::list records;
  for (const auto& r : result.records) {
    py::dict row;
    row["iteration"] = r.iteration;
    row["oracle_kind"] = jbr::to_string(r.kind);
    row["nashconv"] = r.nashconv;
    row["min_nashconv_so_far"] = r.min_nashconv;
    row["cumulative_br_episodes"] = r.cumulative_episodes;
    row["br_values"] = r.br_values;
    records.append(row);
  }
  py::dict out;
  out["method"] = cfg.method();
  out["records"] = records;
  out["meta_profile"] = result.meta_profile;
  return out;
}

py::dict theory_check(const std::string& game, int trials, const std::vector<double>& deltas,
                      std::uint64_t seed) {
  const auto report = jbr::theory_check_perturbation(jbr::GameId::parse(game), trials, deltas, seed);
  py::list rows;
  for (const auto& r : report.rows) {
    py::dict row;
    row["delta"] = r.delta;
    row["trials"] = r.trials;
    row["violations"] = r.violations;
    row["max_gap"] = r.max_gap;
    row["max_measured_delta"] = r.max_measured_delta;
    row["min_slack"] = r.min_slack;
    rows.append(row);
  }
  py::dict out;
  out["game"] = report.game;
  out["range"] = report.range;
  out["rows"] = rows;
  return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "PSRO with joint and independent best-response oracles";
  m.attr("__version__") = std::string(jbr::kVersion);

  py::class_<jbr::MarkovGame>(m, "Game")
      .def_property_readonly("id", [](const jbr::MarkovGame& g) { return g.id().to_string(); })
      .def_property_readonly("num_players", &jbr::MarkovGame::num_players)
      .def_property_readonly("num_nodes", &jbr::MarkovGame::num_nodes)
      .def_property_readonly("payoff_range",
                             [](const jbr::MarkovGame& g) { return g.payoff_bounds().range(); })
      .def("num_infostates", &jbr::MarkovGame::num_infostates, py::arg("player"))
      .def("infostate_keys", &infostate_keys, py::arg("player"))
      .def("uniform_profile", &uniform_profile);

  m.def("build_game", [](const std::string& id) { return jbr::build_game(jbr::GameId::parse(id)); },
        py::arg("id"), "Builds kuhn, leduc or matrix:<seed>:<rows>x<cols>.");
  m.def("matrix_game", [](const Table& payoffs) { return jbr::make_matrix_game(payoffs); },
        py::arg("payoffs"), "Two-player zero-sum matrix game from the row player's payoffs.");
  m.def("expected_payoff",
        [](const jbr::MarkovGame& g, const std::vector<Table>& tables) {
          const auto profile = to_profile(g, tables);
          return jbr::expected_payoff(g, profile);
        },
        py::arg("game"), py::arg("profile"));
  m.def("exact_best_response", &best_response, py::arg("game"), py::arg("player"),
        py::arg("profile"));
  m.def("nashconv",
        [](const jbr::MarkovGame& g, const std::vector<Table>& tables) {
          const auto profile = to_profile(g, tables);
          return jbr::nashconv(g, std::span<const jbr::BehaviorPolicy>(profile));
        },
        py::arg("game"), py::arg("profile"));
  m.def("prd_matrix", &prd_matrix, py::arg("payoffs"), py::arg("steps") = 100'000,
        py::arg("dt") = 1e-3, py::arg("floor") = 1e-10,
        "Projected replicator dynamics on a zero-sum matrix game.");
  m.def("run_psro", &run, py::arg("game"), py::arg("method") = "psro", py::arg("iterations") = 100,
        py::arg("budget") = 10'000, py::arg("seed") = 0, py::arg("delta") = -1.0,
        py::arg("prd_steps") = 100'000);
  m.def("theory_check", &theory_check, py::arg("game"), py::arg("trials"), py::arg("deltas"),
        py::arg("seed") = 0);

  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const std::invalid_argument& e) {
      PyErr_SetString(PyExc_ValueError, e.what());
    }
  });
}
