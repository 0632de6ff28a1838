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

#include "jbr/policy.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <string>

namespace jbr {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

void fnv_mix(std::uint64_t& h, const void* data, std::size_t size) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= bytes[i];
    h *= kFnvPrime;
  }
}

}  // namespace

BehaviorPolicy BehaviorPolicy::uniform(const MarkovGame& game, int player) {
  std::vector<std::vector<double>> table(static_cast<std::size_t>(game.num_infostates(player)));
  for (int s = 0; s < game.num_infostates(player); ++s) {
    const int k = game.infostate(player, s).num_actions();
    table[static_cast<std::size_t>(s)].assign(static_cast<std::size_t>(k), 1.0 / k);
  }
  return BehaviorPolicy(player, std::move(table));
}

BehaviorPolicy BehaviorPolicy::pure(const MarkovGame& game, int player,
                                    std::span<const int> actions) {
  if (actions.size() != static_cast<std::size_t>(game.num_infostates(player))) {
    throw std::invalid_argument("pure policy needs one action per infostate");
  }
  std::vector<std::vector<double>> table(actions.size());
  for (std::size_t s = 0; s < actions.size(); ++s) {
    const int k = game.infostate(player, static_cast<int>(s)).num_actions();
    if (actions[s] < 0 || actions[s] >= k) throw std::invalid_argument("illegal action in pure policy");
    table[s].assign(static_cast<std::size_t>(k), 0.0);
    table[s][static_cast<std::size_t>(actions[s])] = 1.0;
  }
  return BehaviorPolicy(player, std::move(table));
}

BehaviorPolicy BehaviorPolicy::random(const MarkovGame& game, int player, Rng& rng) {
  std::vector<std::vector<double>> table(static_cast<std::size_t>(game.num_infostates(player)));
  for (int s = 0; s < game.num_infostates(player); ++s) {
    auto& row = table[static_cast<std::size_t>(s)];
    row.resize(static_cast<std::size_t>(game.infostate(player, s).num_actions()));
    // Normalized exponentials are uniform on the simplex.
    double total = 0.0;
    for (double& x : row) {
      x = -std::log(1.0 - rng.uniform());
      total += x;
    }
    for (double& x : row) x /= total;
  }
  return BehaviorPolicy(player, std::move(table));
}

void BehaviorPolicy::validate(const MarkovGame& game) const {
  if (player_ < 0 || player_ >= game.num_players()) {
    throw std::invalid_argument("policy player index out of range");
  }
  if (table_.size() != static_cast<std::size_t>(game.num_infostates(player_))) {
    throw std::invalid_argument("policy for player " + std::to_string(player_) + " covers " +
                                std::to_string(table_.size()) + " infostates, game has " +
                                std::to_string(game.num_infostates(player_)));
  }
  for (std::size_t s = 0; s < table_.size(); ++s) {
    const auto& info = game.infostate(player_, static_cast<int>(s));
    const auto& row = table_[s];
    if (row.size() != static_cast<std::size_t>(info.num_actions())) {
      throw std::invalid_argument("policy row size mismatch at '" + info.key + "'");
    }
    double total = 0.0;
    for (double p : row) {
      if (!(p >= 0.0)) throw std::invalid_argument("negative probability at '" + info.key + "'");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
      throw std::invalid_argument("policy row does not sum to one at '" + info.key + "'");
    }
  }
}

std::uint64_t BehaviorPolicy::hash() const {
  std::uint64_t h = kFnvOffset;
  fnv_mix(h, &player_, sizeof(player_));
  for (const auto& row : table_) {
    const auto size = static_cast<std::uint64_t>(row.size());
    fnv_mix(h, &size, sizeof(size));
    fnv_mix(h, row.data(), row.size() * sizeof(double));
  }
  return h;
}

std::uint64_t profile_hash(std::span<const BehaviorPolicy> profile) {
  std::uint64_t h = kFnvOffset;
  for (const auto& policy : profile) {
    const std::uint64_t ph = policy.hash();
    fnv_mix(h, &ph, sizeof(ph));
  }
  return h;
}

Profile uniform_profile(const MarkovGame& game) {
  Profile profile;
  for (int p = 0; p < game.num_players(); ++p) profile.push_back(BehaviorPolicy::uniform(game, p));
  return profile;
}

double max_l1_distance(const BehaviorPolicy& a, const BehaviorPolicy& b) {
  if (a.num_infostates() != b.num_infostates()) {
    throw std::invalid_argument("policies cover different infostate sets");
  }
  double worst = 0.0;
  for (std::size_t s = 0; s < a.num_infostates(); ++s) {
    const auto pa = a.probs(static_cast<int>(s));
    const auto pb = b.probs(static_cast<int>(s));
    double d = 0.0;
    for (std::size_t k = 0; k < pa.size(); ++k) d += std::abs(pa[k] - pb[k]);
    worst = std::max(worst, d);
  }
  return worst;
}

}  // namespace jbr
