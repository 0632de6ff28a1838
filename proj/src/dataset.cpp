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

#include "jbr/dataset.hpp"

#include <algorithm>
#include <cstring>
#include <istream>
#include <map>
#include <ostream>
#include <stdexcept>
#include <thread>

#include "jbr/evaluation.hpp"
#include "jbr/rng.hpp"

namespace jbr {

std::string to_string(ExplorationKind kind) {
  switch (kind) {
    case ExplorationKind::kNone:
      return "none";
    case ExplorationKind::kRandom:
      return "random";
    case ExplorationKind::kTargeted:
      return "targeted";
  }
  return "?";
}

ExplorationKind parse_exploration_kind(std::string_view text) {
  if (text == "none") return ExplorationKind::kNone;
  if (text == "random") return ExplorationKind::kRandom;
  if (text == "targeted") return ExplorationKind::kTargeted;
  throw std::invalid_argument("unknown exploration kind '" + std::string(text) + "'");
}

void ExplorationSpec::validate() const {
  if (!(delta >= 0.0 && delta <= 1.0)) throw std::invalid_argument("delta must lie in [0, 1]");
  if (kind == ExplorationKind::kTargeted && targeted.empty()) {
    throw std::invalid_argument("targeted exploration needs one policy per player");
  }
}

Profile perturb(std::span<const BehaviorPolicy> profile, const ExplorationSpec& spec,
                const MarkovGame& game) {
  spec.validate();
  Profile out(profile.begin(), profile.end());
  if (spec.kind == ExplorationKind::kNone || spec.delta == 0.0) return out;
  if (spec.kind == ExplorationKind::kTargeted && spec.targeted.size() != profile.size()) {
    throw std::invalid_argument("targeted exploration needs one policy per player");
  }
  const double delta = spec.delta;
  for (std::size_t j = 0; j < out.size(); ++j) {
    auto& policy = out[j];
    const int player = policy.player();
    for (int s = 0; s < game.num_infostates(player); ++s) {
      auto& row = policy.mutable_probs(s);
      if (spec.kind == ExplorationKind::kRandom) {
        const double u = 1.0 / static_cast<double>(row.size());
        for (double& p : row) p = (1.0 - delta) * p + delta * u;
      } else {
        const auto nu = spec.targeted[j].probs(s);
        for (std::size_t a = 0; a < row.size(); ++a) row[a] = (1.0 - delta) * row[a] + delta * nu[a];
      }
    }
  }
  return out;
}

double l1_perturbation_bound(const ExplorationSpec& spec) { return 2.0 * spec.delta; }

JointDataset::JointDataset(const MarkovGame& game, CollectionTag tag)
    : game_id_(game.id()), num_players_(game.num_players()), tag_(tag) {
  counts_.resize(static_cast<std::size_t>(num_players_));
  for (int p = 0; p < num_players_; ++p) {
    auto& table = counts_[static_cast<std::size_t>(p)];
    table.resize(static_cast<std::size_t>(game.num_infostates(p)));
    for (int s = 0; s < game.num_infostates(p); ++s) {
      table[static_cast<std::size_t>(s)].assign(
          static_cast<std::size_t>(game.infostate(p, s).num_actions()), 0);
    }
  }
}

std::int64_t JointDataset::count(int player, int infostate, int action) const {
  return counts_[static_cast<std::size_t>(player)][static_cast<std::size_t>(infostate)]
                [static_cast<std::size_t>(action)];
}

void JointDataset::count_transition(const MarkovGame& game, const Transition& t) {
  const Node& node = game.node(t.state);
  for (std::size_t k = 0; k < node.actors.size(); ++k) {
    const int p = node.actors[k];
    ++counts_[static_cast<std::size_t>(p)][static_cast<std::size_t>(node.infostates[k])]
             [static_cast<std::size_t>(t.actions[static_cast<std::size_t>(p)])];
  }
}

void JointDataset::append_episode(const MarkovGame& game, std::span<const Transition> episode) {
  if (episode.empty() || !game.node(episode.back().next).is_terminal()) {
    throw std::invalid_argument("episode must end in a terminal state");
  }
  for (const auto& t : episode) {
    count_transition(game, t);
    transitions_.push_back(t);
  }
  ++episodes_;
}

void JointDataset::merge(const MarkovGame& game, const JointDataset& other) {
  for (const auto& t : other.transitions_) {
    count_transition(game, t);
    transitions_.push_back(t);
  }
  episodes_ += other.episodes_;
}

void JointDataset::check_consistency(const MarkovGame& game) const {
  JointDataset fresh(game, tag_);
  std::uint64_t episodes = 0;
  for (const auto& t : transitions_) {
    fresh.count_transition(game, t);
    if (game.node(t.next).is_terminal()) ++episodes;
  }
  if (fresh.counts_ != counts_) throw std::logic_error("dataset counts do not match transitions");
  if (episodes != episodes_) throw std::logic_error("dataset episode count mismatch");
}

namespace {

template <typename T>
void put(std::ostream& out, T value) {
  char buf[sizeof(T)];
  std::memcpy(buf, &value, sizeof(T));
  out.write(buf, sizeof(T));
}

template <typename T>
T get(std::istream& in) {
  char buf[sizeof(T)];
  if (!in.read(buf, sizeof(T))) throw std::runtime_error("truncated dataset stream");
  T value;
  std::memcpy(&value, buf, sizeof(T));
  return value;
}

constexpr char kMagic[4] = {'J', 'B', 'R', 'D'};
constexpr std::uint32_t kVersion = 1;

}  // namespace

void JointDataset::write_binary(std::ostream& out) const {
  out.write(kMagic, 4);
  put<std::uint32_t>(out, kVersion);
  const std::string id = game_id_.to_string();
  put<std::uint32_t>(out, static_cast<std::uint32_t>(id.size()));
  out.write(id.data(), static_cast<std::streamsize>(id.size()));
  put<std::uint64_t>(out, tag_.base_profile_hash);
  put<double>(out, tag_.delta);
  put<std::uint8_t>(out, static_cast<std::uint8_t>(tag_.kind));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(num_players_));
  put<std::uint64_t>(out, episodes_);
  put<std::uint64_t>(out, transitions_.size());
  const auto n = static_cast<std::uint32_t>(num_players_);
  const std::uint32_t record_bytes = 3 * 4 + n * 4 + n * 8;
  for (const auto& t : transitions_) {
    put<std::uint32_t>(out, record_bytes);
    put<std::int32_t>(out, t.state);
    put<std::int32_t>(out, t.next);
    put<std::int32_t>(out, t.chance);
    for (auto a : t.actions) put<std::int32_t>(out, a);
    for (double r : t.rewards) put<double>(out, r);
  }
}

JointDataset JointDataset::read_binary(std::istream& in, const MarkovGame& game) {
  char magic[4];
  if (!in.read(magic, 4) || std::memcmp(magic, kMagic, 4) != 0) {
    throw std::runtime_error("not a joint dataset stream");
  }
  if (get<std::uint32_t>(in) != kVersion) throw std::runtime_error("unsupported dataset version");
  std::string id(get<std::uint32_t>(in), '\0');
  if (!in.read(id.data(), static_cast<std::streamsize>(id.size()))) {
    throw std::runtime_error("truncated dataset stream");
  }
  if (GameId::parse(id) != game.id()) throw std::runtime_error("dataset belongs to game " + id);
  CollectionTag tag;
  tag.base_profile_hash = get<std::uint64_t>(in);
  tag.delta = get<double>(in);
  tag.kind = static_cast<ExplorationKind>(get<std::uint8_t>(in));
  const auto players = get<std::uint32_t>(in);
  if (players != static_cast<std::uint32_t>(game.num_players())) {
    throw std::runtime_error("dataset player count mismatch");
  }
  const auto episodes = get<std::uint64_t>(in);
  const auto count = get<std::uint64_t>(in);

  JointDataset data(game, tag);
  std::vector<Transition> episode;
  for (std::uint64_t i = 0; i < count; ++i) {
    const auto bytes = get<std::uint32_t>(in);
    if (bytes != 3 * 4 + players * 12) throw std::runtime_error("bad dataset record length");
    Transition t;
    t.state = get<std::int32_t>(in);
    t.next = get<std::int32_t>(in);
    t.chance = get<std::int32_t>(in);
    for (std::uint32_t p = 0; p < players; ++p) t.actions.push_back(get<std::int32_t>(in));
    for (std::uint32_t p = 0; p < players; ++p) t.rewards.push_back(get<double>(in));
    if (t.state < 0 || static_cast<std::size_t>(t.state) >= game.num_nodes() || t.next < 0 ||
        static_cast<std::size_t>(t.next) >= game.num_nodes()) {
      throw std::runtime_error("dataset record refers to unknown state");
    }
    const bool done = game.node(t.next).is_terminal();
    episode.push_back(std::move(t));
    if (done) {
      data.append_episode(game, episode);
      episode.clear();
    }
  }
  if (!episode.empty() || data.num_episodes() != episodes) {
    throw std::runtime_error("dataset episode structure mismatch");
  }
  return data;
}

void JointDataset::write_csv(std::ostream& out, const MarkovGame& game) const {
  out << "episode,step,state,history,next,chance";
  for (int p = 0; p < num_players_; ++p) out << ",a" << p;
  for (int p = 0; p < num_players_; ++p) out << ",r" << p;
  out << '\n';
  std::uint64_t episode = 0;
  std::uint64_t step = 0;
  for (const auto& t : transitions_) {
    out << episode << ',' << step << ',' << t.state << ",\"" << game.node(t.state).history << "\","
        << t.next << ',' << t.chance;
    for (auto a : t.actions) out << ',' << a;
    for (double r : t.rewards) out << ',' << r;
    out << '\n';
    ++step;
    if (game.node(t.next).is_terminal()) {
      ++episode;
      step = 0;
    }
  }
}

namespace {

JointDataset collect_shard(const MarkovGame& game, std::span<const BehaviorPolicy> profile,
                           std::uint64_t episodes, std::uint64_t seed, CollectionTag tag) {
  JointDataset shard(game, tag);
  Rng rng(seed);
  std::vector<JointDataset::Transition> buffer;
  for (std::uint64_t e = 0; e < episodes; ++e) {
    const auto trace = play_episode(game, profile, rng);
    buffer.clear();
    for (const auto& step : trace.steps) {
      JointDataset::Transition t;
      t.state = step.state;
      t.next = step.next;
      t.chance = step.chance_outcome;
      t.actions.assign(step.actions.begin(), step.actions.end());
      t.rewards = step.rewards;
      buffer.push_back(std::move(t));
    }
    shard.append_episode(game, buffer);
  }
  return shard;
}

}  // namespace

JointDataset collect(const MarkovGame& game, std::span<const BehaviorPolicy> profile,
                     std::uint64_t episodes, std::uint64_t seed, CollectionTag tag, int jobs) {
  if (episodes == 0) throw std::invalid_argument("collect needs at least one episode");
  for (const auto& policy : profile) policy.validate(game);
  const std::uint64_t num_shards = (episodes + kShardEpisodes - 1) / kShardEpisodes;
  std::vector<JointDataset> shards(num_shards);
  auto run_shard = [&](std::uint64_t s) {
    const std::uint64_t begin = s * kShardEpisodes;
    const std::uint64_t count = std::min(kShardEpisodes, episodes - begin);
    shards[s] = collect_shard(game, profile, count, derive_seed(seed, s), tag);
  };
  const auto workers = static_cast<std::uint64_t>(std::max(1, jobs));
  if (workers == 1 || num_shards == 1) {
    for (std::uint64_t s = 0; s < num_shards; ++s) run_shard(s);
  } else {
    std::vector<std::jthread> pool;
    for (std::uint64_t w = 0; w < std::min(workers, num_shards); ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t s = w; s < num_shards; s += workers) run_shard(s);
      });
    }
  }
  JointDataset data(game, tag);
  for (const auto& shard : shards) data.merge(game, shard);
  return data;
}

// ---------------------------------------------------------------------------
// Model estimation

bool EstimatedModel::supported(int infostate, int action) const {
  const int s = state_of_infostate[static_cast<std::size_t>(infostate)];
  return s >= 0 && mdp.supported[mdp.pair(s, action)];
}

std::int64_t EstimatedModel::count(int infostate, int action) const {
  const int s = state_of_infostate[static_cast<std::size_t>(infostate)];
  return s >= 0 ? counts[mdp.pair(s, action)] : 0;
}

double EstimatedModel::start_value(std::span<const double> state_values) const {
  double value = initial_reward;
  for (const auto& next : initial) {
    if (next.state == kTerminalState) continue;
    value += next.prob * next.discount * state_values[static_cast<std::size_t>(next.state)];
  }
  return value;
}

namespace {

// Raw sufficient statistics for one (infostate, action) pair or the start.
struct PairStats {
  std::int64_t count = 0;
  double reward_sum = 0.0;
  std::map<int, std::pair<std::int64_t, double>> next;  // infostate -> (count, discount sum)

  void add(int next_infostate, double reward, double discount) {
    ++count;
    reward_sum += reward;
    auto& slot = next[next_infostate];
    ++slot.first;
    slot.second += discount;
  }
};

}  // namespace

EstimatedModel estimate_model(const JointDataset& data, const MarkovGame& game, int player) {
  if (data.num_players() != 0 && !(data.game_id() == game.id())) {
    throw std::invalid_argument("dataset was collected on a different game");
  }
  const int num_info = game.num_infostates(player);
  std::vector<std::vector<PairStats>> stats(static_cast<std::size_t>(num_info));
  for (int s = 0; s < num_info; ++s) {
    stats[static_cast<std::size_t>(s)].resize(
        static_cast<std::size_t>(game.infostate(player, s).num_actions()));
  }
  std::vector<bool> observed(static_cast<std::size_t>(num_info), false);
  PairStats start;
  const double gamma = game.discount();

  int pending_info = -1;
  int pending_action = -1;
  double acc = 0.0;
  double disc = 1.0;
  auto close = [&](int next_info) {
    if (pending_info < 0) {
      start.add(next_info, acc, disc);
    } else {
      stats[static_cast<std::size_t>(pending_info)][static_cast<std::size_t>(pending_action)].add(
          next_info, acc, disc);
    }
  };
  for (const auto& t : data.transitions()) {
    const Node& node = game.node(t.state);
    const int slot = node.actor_slot(player);
    const double r = t.rewards[static_cast<std::size_t>(player)];
    if (slot >= 0) {
      const int info = node.infostates[static_cast<std::size_t>(slot)];
      close(info);
      observed[static_cast<std::size_t>(info)] = true;
      pending_info = info;
      pending_action = t.actions[static_cast<std::size_t>(player)];
      acc = r;
      disc = gamma;
    } else {
      acc += disc * r;
      disc *= gamma;
    }
    if (game.node(t.next).is_terminal()) {
      close(-1);
      pending_info = -1;
      pending_action = -1;
      acc = 0.0;
      disc = 1.0;
    }
  }

  EstimatedModel model;
  model.player = player;
  model.state_of_infostate.assign(static_cast<std::size_t>(num_info), -1);
  for (int s = 0; s < num_info; ++s) {
    if (!observed[static_cast<std::size_t>(s)]) continue;
    model.state_of_infostate[static_cast<std::size_t>(s)] =
        model.mdp.add_state(game.infostate(player, s).num_actions());
    model.infostate_of_state.push_back(s);
  }
  model.counts.assign(model.mdp.num_pairs(), 0);

  auto successors = [&](const PairStats& ps) {
    std::vector<Successor> out;
    for (const auto& [info, slot] : ps.next) {
      const int state = info < 0 ? kTerminalState : model.state_of_infostate[static_cast<std::size_t>(info)];
      out.push_back(Successor{state, static_cast<double>(slot.first) / static_cast<double>(ps.count),
                              slot.second / static_cast<double>(slot.first)});
    }
    return out;
  };
  for (int state = 0; state < model.mdp.num_states(); ++state) {
    const int info = model.infostate_of_state[static_cast<std::size_t>(state)];
    const auto& row = stats[static_cast<std::size_t>(info)];
    for (std::size_t a = 0; a < row.size(); ++a) {
      const std::size_t sa = model.mdp.pair(state, static_cast<int>(a));
      model.counts[sa] = row[a].count;
      if (row[a].count == 0) continue;
      model.mdp.supported[sa] = true;
      model.mdp.reward[sa] = row[a].reward_sum / static_cast<double>(row[a].count);
      model.mdp.successors[sa] = successors(row[a]);
    }
  }
  if (start.count > 0) {
    model.initial_reward = start.reward_sum / static_cast<double>(start.count);
    model.initial = successors(start);
  }
  return model;
}

}  // namespace jbr
