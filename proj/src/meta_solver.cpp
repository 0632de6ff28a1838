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

#include "jbr/meta_solver.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

#include "jbr/evaluation.hpp"
#include "jbr/rng.hpp"

namespace jbr {

std::string EvalMode::to_string() const {
  return kind == kExact ? "exact" : "rollout(" + std::to_string(rollouts) + ")";
}

EmpiricalGame::EmpiricalGame(int num_players, EvalMode mode)
    : num_players_(num_players),
      mode_(mode),
      policies_(static_cast<std::size_t>(num_players)),
      payoffs_(static_cast<std::size_t>(num_players)) {
  if (num_players < 1) throw std::invalid_argument("empirical game needs at least one player");
  if (mode.kind == EvalMode::kRollout && mode.rollouts == 0) {
    throw std::invalid_argument("rollout mode needs a positive episode count");
  }
}

std::vector<int> EmpiricalGame::shape() const {
  std::vector<int> out;
  for (const auto& set : policies_) out.push_back(static_cast<int>(set.size()));
  return out;
}

std::size_t EmpiricalGame::num_profiles() const {
  std::size_t total = 1;
  for (const auto& set : policies_) total *= set.size();
  return policies_.empty() ? 0 : total;
}

std::size_t EmpiricalGame::flat_index(std::span<const int> pure) const {
  std::size_t flat = 0;
  for (std::size_t p = 0; p < policies_.size(); ++p) {
    flat = flat * policies_[p].size() + static_cast<std::size_t>(pure[p]);
  }
  return flat;
}

std::vector<double> EmpiricalGame::evaluate(const MarkovGame& game, std::span<const int> pure,
                                            std::size_t flat) const {
  Profile profile;
  for (std::size_t p = 0; p < policies_.size(); ++p) {
    profile.push_back(policies_[p][static_cast<std::size_t>(pure[p])]);
  }
  if (mode_.kind == EvalMode::kExact) return expected_payoff(game, profile);
  std::vector<double> mean(policies_.size(), 0.0);
  Rng rng(derive_seed(mode_.seed, flat));
  for (std::uint64_t k = 0; k < mode_.rollouts; ++k) {
    const auto trace = play_episode(game, profile, rng);
    for (std::size_t p = 0; p < mean.size(); ++p) mean[p] += trace.returns[p];
  }
  for (double& v : mean) v /= static_cast<double>(mode_.rollouts);
  return mean;
}

std::size_t EmpiricalGame::extend(std::span<const BehaviorPolicy> new_policies,
                                  const MarkovGame& game) {
  if (new_policies.size() != policies_.size() || game.num_players() != num_players_) {
    throw std::invalid_argument("extend needs one new policy per player");
  }
  const auto old_shape = shape();
  for (std::size_t p = 0; p < policies_.size(); ++p) {
    if (new_policies[p].player() != static_cast<int>(p)) {
      throw std::invalid_argument("new policy listed under the wrong player");
    }
    policies_[p].push_back(new_policies[p]);
  }
  const auto new_shape = shape();
  const std::size_t total = num_profiles();
  std::vector<std::vector<double>> next(payoffs_.size(), std::vector<double>(total, 0.0));

  const auto& bounds = game.payoff_bounds();
  const double tol = 1e-9 * std::max(1.0, bounds.range());
  std::size_t evaluated = 0;
  std::vector<int> pure(policies_.size(), 0);
  for (std::size_t flat = 0; flat < total; ++flat) {
    // Mixed-radix decode, last player least significant.
    std::size_t rest = flat;
    bool is_new = false;
    for (std::size_t p = policies_.size(); p-- > 0;) {
      pure[p] = static_cast<int>(rest % static_cast<std::size_t>(new_shape[p]));
      rest /= static_cast<std::size_t>(new_shape[p]);
      is_new = is_new || pure[p] == old_shape[p];
    }
    if (!is_new) {
      std::size_t old_flat = 0;
      for (std::size_t p = 0; p < policies_.size(); ++p) {
        old_flat = old_flat * static_cast<std::size_t>(old_shape[p]) + static_cast<std::size_t>(pure[p]);
      }
      for (std::size_t p = 0; p < payoffs_.size(); ++p) next[p][flat] = payoffs_[p][old_flat];
      continue;
    }
    const auto u = evaluate(game, pure, flat);
    double sum = 0.0;
    for (std::size_t p = 0; p < u.size(); ++p) {
      if (u[p] < bounds.lo - tol || u[p] > bounds.hi + tol) {
        throw std::logic_error("empirical payoff outside the game's payoff bounds");
      }
      next[p][flat] = u[p];
      sum += u[p];
    }
    if (game.zero_sum() && mode_.kind == EvalMode::kExact && std::abs(sum) > tol) {
      throw std::logic_error("empirical payoffs of a zero-sum game do not sum to zero");
    }
    ++evaluated;
  }
  payoffs_ = std::move(next);
  return evaluated;
}

// ---------------------------------------------------------------------------
// Checkpoints

void EmpiricalGame::save(std::ostream& out) const {
  nlohmann::json j;
  j["format"] = "jbr-empirical-game";
  j["version"] = 1;
  j["num_players"] = num_players_;
  j["mode"] = {{"kind", mode_.kind == EvalMode::kExact ? "exact" : "rollout"},
               {"rollouts", mode_.rollouts},
               {"seed", mode_.seed}};
  j["shape"] = shape();
  auto& sets = j["policies"] = nlohmann::json::array();
  for (const auto& set : policies_) {
    auto& list = sets.emplace_back(nlohmann::json::array());
    for (const auto& policy : set) list.push_back(policy.table());
  }
  j["payoffs"] = payoffs_;
  out << j.dump() << '\n';
}

EmpiricalGame EmpiricalGame::load(std::istream& in) {
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed empirical game checkpoint: ") + e.what());
  }
  if (j.value("format", "") != "jbr-empirical-game" || j.value("version", 0) != 1) {
    throw std::invalid_argument("not an empirical game checkpoint");
  }
  EvalMode mode;
  const auto& m = j.at("mode");
  mode.kind = m.at("kind").get<std::string>() == "exact" ? EvalMode::kExact : EvalMode::kRollout;
  mode.rollouts = m.at("rollouts").get<std::uint64_t>();
  mode.seed = m.at("seed").get<std::uint64_t>();
  EmpiricalGame eg(j.at("num_players").get<int>(), mode);
  const auto& sets = j.at("policies");
  for (std::size_t p = 0; p < eg.policies_.size(); ++p) {
    for (const auto& table : sets.at(p)) {
      eg.policies_[p].emplace_back(static_cast<int>(p),
                                   table.get<std::vector<std::vector<double>>>());
    }
  }
  eg.payoffs_ = j.at("payoffs").get<std::vector<std::vector<double>>>();
  if (eg.shape() != j.at("shape").get<std::vector<int>>()) {
    throw std::invalid_argument("checkpoint shape does not match its policy sets");
  }
  for (const auto& tensor : eg.payoffs_) {
    if (tensor.size() != eg.num_profiles()) {
      throw std::invalid_argument("checkpoint tensor has the wrong size");
    }
  }
  return eg;
}

// ---------------------------------------------------------------------------
// Meta-strategy solver

void project_to_simplex(std::span<double> x, double floor) {
  const std::size_t n = x.size();
  const double mass = 1.0 - floor * static_cast<double>(n);
  if (mass < 0.0) throw std::invalid_argument("simplex floor too large for the dimension");
  // Michelot's active-set iteration on y = x - floor: the set {y > theta}
  // only shrinks, and theta is exact once it stops changing.
  double theta = -std::numeric_limits<double>::infinity();
  std::size_t active = n + 1;
  for (;;) {
    double sum = 0.0;
    std::size_t count = 0;
    for (double v : x) {
      if (v - floor > theta) {
        sum += v - floor;
        ++count;
      }
    }
    if (count >= active || count == 0) break;
    active = count;
    theta = (sum - mass) / static_cast<double>(count);
  }
  for (double& v : x) v = std::max(v - floor - theta, 0.0) + floor;
}

std::vector<double> deviation_payoffs(const EmpiricalGame& eg, const MetaProfile& profile,
                                      int player) {
  const auto shape = eg.shape();
  const auto& tensor = eg.payoffs(player);
  const std::size_t players = shape.size();
  std::vector<double> out(static_cast<std::size_t>(shape[static_cast<std::size_t>(player)]), 0.0);
  std::vector<int> pure(players, 0);
  for (std::size_t flat = 0; flat < tensor.size(); ++flat) {
    std::size_t rest = flat;
    double weight = 1.0;
    for (std::size_t p = players; p-- > 0;) {
      pure[p] = static_cast<int>(rest % static_cast<std::size_t>(shape[p]));
      rest /= static_cast<std::size_t>(shape[p]);
      if (static_cast<int>(p) != player) weight *= profile[p][static_cast<std::size_t>(pure[p])];
    }
    out[static_cast<std::size_t>(pure[static_cast<std::size_t>(player)])] += weight * tensor[flat];
  }
  return out;
}

double restricted_regret(const EmpiricalGame& eg, const MetaProfile& profile) {
  if (profile.size() != static_cast<std::size_t>(eg.num_players())) {
    throw std::invalid_argument("meta profile has the wrong number of players");
  }
  double total = 0.0;
  for (int p = 0; p < eg.num_players(); ++p) {
    const auto dev = deviation_payoffs(eg, profile, p);
    const auto& x = profile[static_cast<std::size_t>(p)];
    if (x.size() != dev.size()) throw std::invalid_argument("meta profile shape mismatch");
    const double value = std::inner_product(x.begin(), x.end(), dev.begin(), 0.0);
    total += *std::max_element(dev.begin(), dev.end()) - value;
  }
  return total;
}

namespace {

// Four independent partial sums so the loop vectorizes without reassociation.
double dot(const double* a, const double* b, std::size_t n) {
  double s0 = 0.0, s1 = 0.0, s2 = 0.0, s3 = 0.0;
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    s0 += a[k] * b[k];
    s1 += a[k + 1] * b[k + 1];
    s2 += a[k + 2] * b[k + 2];
    s3 += a[k + 3] * b[k + 3];
  }
  for (; k < n; ++k) s0 += a[k] * b[k];
  return (s0 + s1) + (s2 + s3);
}

void replicator_step(std::vector<double>& x, const std::vector<double>& dev, double dt,
                     double floor) {
  const double value = std::inner_product(x.begin(), x.end(), dev.begin(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) x[k] += dt * x[k] * (dev[k] - value);
  project_to_simplex(x, floor);
}

// Two players: the deviation payoffs are two matrix-vector products.
MetaProfile prd_two_player(const EmpiricalGame& eg, const PrdOptions& opts) {
  const auto shape = eg.shape();
  const auto m = static_cast<std::size_t>(shape[0]);
  const auto n = static_cast<std::size_t>(shape[1]);
  const auto& a = eg.payoffs(0);  // a[i * n + j]
  std::vector<double> bt(m * n);  // column player's payoffs, transposed
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) bt[j * m + i] = eg.payoffs(1)[i * n + j];
  }
  std::vector<double> x(m, 1.0 / static_cast<double>(m));
  std::vector<double> y(n, 1.0 / static_cast<double>(n));
  std::vector<double> dx(m), dy(n), sum_x(m, 0.0), sum_y(n, 0.0);
  const int burn_in = opts.steps / 2;
  for (int step = 0; step < opts.steps; ++step) {
    for (std::size_t i = 0; i < m; ++i) dx[i] = dot(&a[i * n], y.data(), n);
    for (std::size_t j = 0; j < n; ++j) dy[j] = dot(&bt[j * m], x.data(), m);
    replicator_step(x, dx, opts.dt, opts.floor);
    replicator_step(y, dy, opts.dt, opts.floor);
    if (step >= burn_in) {
      for (std::size_t i = 0; i < m; ++i) sum_x[i] += x[i];
      for (std::size_t j = 0; j < n; ++j) sum_y[j] += y[j];
    }
  }
  const double count = static_cast<double>(opts.steps - burn_in);
  for (double& v : sum_x) v /= count;
  for (double& v : sum_y) v /= count;
  return {sum_x, sum_y};
}

}  // namespace

MetaProfile projected_replicator_dynamics(const EmpiricalGame& eg, const PrdOptions& opts) {
  if (opts.steps < 1) throw std::invalid_argument("PRD needs at least one step");
  const auto shape = eg.shape();
  if (shape.empty() || eg.num_profiles() == 0) throw std::invalid_argument("empty empirical game");
  const int widest = *std::max_element(shape.begin(), shape.end());
  if (opts.floor < 0.0 || opts.floor * widest >= 1.0) {
    throw std::invalid_argument("PRD floor must lie in [0, 1/max|X_i|)");
  }
  if (shape.size() == 2) return prd_two_player(eg, opts);

  MetaProfile x;
  for (int size : shape) x.emplace_back(static_cast<std::size_t>(size), 1.0 / size);
  MetaProfile sum = x;
  for (auto& row : sum) std::fill(row.begin(), row.end(), 0.0);
  const int burn_in = opts.steps / 2;
  for (int step = 0; step < opts.steps; ++step) {
    std::vector<std::vector<double>> dev;
    for (int p = 0; p < eg.num_players(); ++p) dev.push_back(deviation_payoffs(eg, x, p));
    for (std::size_t p = 0; p < x.size(); ++p) replicator_step(x[p], dev[p], opts.dt, opts.floor);
    if (step >= burn_in) {
      for (std::size_t p = 0; p < x.size(); ++p) {
        for (std::size_t k = 0; k < x[p].size(); ++k) sum[p][k] += x[p][k];
      }
    }
  }
  const double count = static_cast<double>(opts.steps - burn_in);
  for (auto& row : sum) {
    for (double& v : row) v /= count;
  }
  return sum;
}

}  // namespace jbr
