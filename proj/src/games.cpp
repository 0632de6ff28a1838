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

#include "jbr/games.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>
#include <string>

#include "jbr/rng.hpp"

namespace jbr {
namespace {

// ---------------------------------------------------------------------------
// Kuhn poker

constexpr std::array<char, 3> kKuhnCards = {'J', 'Q', 'K'};

// Row-player payoff of a finished betting sequence, or 0 if not terminal.
bool kuhn_terminal(const std::string& bets, int card0, int card1, double& payoff0) {
  const double showdown = card0 > card1 ? 1.0 : -1.0;
  if (bets == "pp") {
    payoff0 = showdown;
  } else if (bets == "bp") {
    payoff0 = 1.0;
  } else if (bets == "pbp") {
    payoff0 = -1.0;
  } else if (bets == "bb" || bets == "pbb") {
    payoff0 = 2.0 * showdown;
  } else {
    return false;
  }
  return true;
}

NodeId kuhn_betting(GameBuilder& b, int card0, int card1, const std::string& bets) {
  const int player = static_cast<int>(bets.size() % 2);
  const int card = player == 0 ? card0 : card1;
  const std::string history =
      std::string{kKuhnCards[static_cast<std::size_t>(card0)], kKuhnCards[static_cast<std::size_t>(card1)]} + ":" + bets;
  const std::string key = std::string{kKuhnCards[static_cast<std::size_t>(card)]} + ":" + bets;
  const NodeId id = b.add_decision(history, {{player, key, {"p", "b"}}});
  for (int a = 0; a < 2; ++a) {
    const std::string next = bets + (a == 0 ? 'p' : 'b');
    double payoff0 = 0.0;
    if (kuhn_terminal(next, card0, card1, payoff0)) {
      const NodeId leaf = b.add_terminal(history + (a == 0 ? 'p' : 'b'));
      b.link(id, a, leaf, {payoff0, -payoff0});
    } else {
      b.link(id, a, kuhn_betting(b, card0, card1, next));
    }
  }
  return id;
}

// ---------------------------------------------------------------------------
// Leduc poker

constexpr int kLeducDeck = 6;
constexpr int kLeducMaxRaises = 2;
constexpr std::array<int, 2> kLeducRaise = {2, 4};

std::string leduc_card(int card) {
  return std::string{kKuhnCards[static_cast<std::size_t>(card / 2)], card % 2 == 0 ? 's' : 'h'};
}

struct LeducState {
  std::array<int, 2> cards{-1, -1};
  int public_card = -1;
  int round = 0;
  std::array<std::string, 2> bets;  // per round
  int raises = 0;
  std::array<int, 2> contrib{1, 1};
  int player = 0;

  int stake() const { return std::max(contrib[0], contrib[1]); }

  std::string betting() const { return bets[0] + "/" + bets[1]; }

  std::string history() const {
    std::string h = leduc_card(cards[0]) + leduc_card(cards[1]);
    if (public_card >= 0) h += "|" + leduc_card(public_card);
    return h + ":" + betting();
  }

  std::string infostate_key(int p) const {
    std::string key = leduc_card(cards[static_cast<std::size_t>(p)]);
    if (public_card >= 0) key += "|" + leduc_card(public_card);
    return key + ":" + betting();
  }
};

// Showdown payoff for player 0.
double leduc_showdown(const LeducState& s) {
  const int pub = s.public_card / 2;
  const int r0 = s.cards[0] / 2;
  const int r1 = s.cards[1] / 2;
  const bool pair0 = r0 == pub;
  const bool pair1 = r1 == pub;
  int winner = -1;
  if (pair0 != pair1) {
    winner = pair0 ? 0 : 1;
  } else if (r0 != r1) {
    winner = r0 > r1 ? 0 : 1;
  }
  if (winner < 0) return 0.0;
  const double pot_share = s.contrib[static_cast<std::size_t>(1 - winner)];
  return winner == 0 ? pot_share : -pot_share;
}

NodeId leduc_public_deal(GameBuilder& b, const LeducState& s);

NodeId leduc_betting(GameBuilder& b, const LeducState& s) {
  std::vector<std::string> labels;
  const int p = s.player;
  const bool facing_bet = s.contrib[static_cast<std::size_t>(p)] < s.stake();
  if (facing_bet) labels.push_back("f");
  labels.push_back("c");
  if (s.raises < kLeducMaxRaises) labels.push_back("r");
  const NodeId id = b.add_decision(s.history(), {{p, s.infostate_key(p), labels}});

  for (std::size_t a = 0; a < labels.size(); ++a) {
    const char act = labels[a][0];
    LeducState next = s;
    next.bets[static_cast<std::size_t>(s.round)] += act;
    next.player = 1 - p;
    if (act == 'f') {
      const double lost = s.contrib[static_cast<std::size_t>(p)];
      const NodeId leaf = b.add_terminal(next.history());
      b.link(id, static_cast<int>(a), leaf,
             p == 0 ? std::vector<double>{-lost, lost} : std::vector<double>{lost, -lost});
      continue;
    }
    if (act == 'r') {
      next.contrib[static_cast<std::size_t>(p)] =
          s.stake() + kLeducRaise[static_cast<std::size_t>(s.round)];
      ++next.raises;
      b.link(id, static_cast<int>(a), leduc_betting(b, next));
      continue;
    }
    // Call or check. The round closes unless this is its first action.
    next.contrib[static_cast<std::size_t>(p)] = s.stake();
    if (s.bets[static_cast<std::size_t>(s.round)].empty()) {
      b.link(id, static_cast<int>(a), leduc_betting(b, next));
    } else if (s.round == 0) {
      b.link(id, static_cast<int>(a), leduc_public_deal(b, next));
    } else {
      const double payoff0 = leduc_showdown(next);
      const NodeId leaf = b.add_terminal(next.history());
      b.link(id, static_cast<int>(a), leaf, {payoff0, -payoff0});
    }
  }
  return id;
}

NodeId leduc_public_deal(GameBuilder& b, const LeducState& s) {
  std::vector<int> remaining;
  for (int c = 0; c < kLeducDeck; ++c) {
    if (c != s.cards[0] && c != s.cards[1]) remaining.push_back(c);
  }
  const NodeId id = b.add_chance(s.history(),
                                 std::vector<double>(remaining.size(), 1.0 / remaining.size()));
  for (std::size_t k = 0; k < remaining.size(); ++k) {
    LeducState next = s;
    next.public_card = remaining[k];
    next.round = 1;
    next.raises = 0;
    next.player = 0;
    b.link(id, static_cast<int>(k), leduc_betting(b, next));
  }
  return id;
}

}  // namespace

MarkovGame build_kuhn() {
  GameBuilder b(GameId{GameKind::kKuhn}, 2, 1.0, PayoffBounds{-2.0, 2.0}, true);
  const NodeId deal0 = b.add_chance("", {1.0 / 3, 1.0 / 3, 1.0 / 3});
  for (int c0 = 0; c0 < 3; ++c0) {
    const NodeId deal1 =
        b.add_chance(std::string{kKuhnCards[static_cast<std::size_t>(c0)]}, {0.5, 0.5});
    b.link(deal0, c0, deal1);
    int edge = 0;
    for (int c1 = 0; c1 < 3; ++c1) {
      if (c1 == c0) continue;
      b.link(deal1, edge++, kuhn_betting(b, c0, c1, ""));
    }
  }
  return std::move(b).finish();
}

MarkovGame build_leduc() {
  GameBuilder b(GameId{GameKind::kLeduc}, 2, 1.0, PayoffBounds{-13.0, 13.0}, true);
  const NodeId deal0 = b.add_chance("", std::vector<double>(kLeducDeck, 1.0 / kLeducDeck));
  for (int c0 = 0; c0 < kLeducDeck; ++c0) {
    const NodeId deal1 =
        b.add_chance(leduc_card(c0), std::vector<double>(kLeducDeck - 1, 1.0 / (kLeducDeck - 1)));
    b.link(deal0, c0, deal1);
    int edge = 0;
    for (int c1 = 0; c1 < kLeducDeck; ++c1) {
      if (c1 == c0) continue;
      LeducState s;
      s.cards = {c0, c1};
      b.link(deal1, edge++, leduc_betting(b, s));
    }
  }
  return std::move(b).finish();
}

MarkovGame make_matrix_game(const std::vector<std::vector<double>>& payoffs, GameId id) {
  if (payoffs.empty() || payoffs.front().empty()) throw std::invalid_argument("empty payoff matrix");
  const auto rows = static_cast<int>(payoffs.size());
  const auto cols = static_cast<int>(payoffs.front().size());
  double bound = 0.0;
  for (const auto& row : payoffs) {
    if (static_cast<int>(row.size()) != cols) throw std::invalid_argument("ragged payoff matrix");
    for (double v : row) bound = std::max(bound, std::abs(v));
  }
  if (id.kind != GameKind::kMatrix) {
    id = GameId{GameKind::kMatrix, 0, rows, cols};
  } else {
    // Generated games draw from [-1, 1]; the bound is a property of the law.
    bound = std::max(bound, 1.0);
  }
  GameBuilder b(id, 2, 1.0, PayoffBounds{-bound, bound}, true);
  std::vector<std::string> row_labels, col_labels;
  for (int i = 0; i < rows; ++i) row_labels.push_back("a" + std::to_string(i));
  for (int j = 0; j < cols; ++j) col_labels.push_back("b" + std::to_string(j));
  const NodeId root = b.add_decision("", {{0, "row", row_labels}, {1, "col", col_labels}});
  for (int i = 0; i < rows; ++i) {
    for (int j = 0; j < cols; ++j) {
      const double v = payoffs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      const NodeId leaf = b.add_terminal(row_labels[static_cast<std::size_t>(i)] + "," +
                                         col_labels[static_cast<std::size_t>(j)]);
      b.link(root, i * cols + j, leaf, {v, -v});
    }
  }
  return std::move(b).finish();
}

std::vector<std::vector<double>> random_matrix(std::uint64_t seed, int rows, int cols) {
  if (rows < 1 || cols < 1) throw std::invalid_argument("matrix dimensions must be positive");
  Rng rng(derive_seed(seed, 0x6d6174726978ULL));
  std::vector<std::vector<double>> m(static_cast<std::size_t>(rows),
                                     std::vector<double>(static_cast<std::size_t>(cols)));
  for (auto& row : m) {
    for (double& v : row) v = 2.0 * rng.uniform() - 1.0;
  }
  return m;
}

MarkovGame build_game(const GameId& id, std::size_t node_budget) {
  MarkovGame game = [&] {
    switch (id.kind) {
      case GameKind::kKuhn:
        return build_kuhn();
      case GameKind::kLeduc:
        return build_leduc();
      case GameKind::kMatrix:
        return make_matrix_game(random_matrix(id.seed, id.rows, id.cols), id);
    }
    throw std::invalid_argument("unknown game kind");
  }();
  game.check_budget(node_budget);
  return game;
}

}  // namespace jbr
