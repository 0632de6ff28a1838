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

#ifndef JBR_GAMES_HPP
#define JBR_GAMES_HPP

#include <cstdint>
#include <vector>

#include "jbr/game.hpp"

namespace jbr {

// Kuhn poker: 3 cards, ante 1, one betting round with bet size 1.
// Actions are {pass, bet}; payoffs in [-2, 2].
MarkovGame build_kuhn();

// Leduc poker: 6 cards (3 ranks x 2 suits), ante 1, two betting rounds with
// raise sizes 2 then 4 and at most 2 raises per round. Actions are a subset
// of {fold, call, raise}; fold is legal only when facing a bet. Payoffs in
// [-13, 13].
MarkovGame build_leduc();

// Two-player zero-sum one-shot game: the row player receives M[i][j], the
// column player -M[i][j]. Both players move simultaneously at the root.
MarkovGame make_matrix_game(const std::vector<std::vector<double>>& payoffs, GameId id = {});

// Row-player payoffs drawn uniformly from [-1, 1] for matrix:<seed>:<m>x<n>.
std::vector<std::vector<double>> random_matrix(std::uint64_t seed, int rows, int cols);

// Dispatch on a parsed id. Throws std::invalid_argument for malformed ids
// and NodeBudgetExceeded when the tree would exceed `node_budget`.
MarkovGame build_game(const GameId& id, std::size_t node_budget = kDefaultNodeBudget);

}  // namespace jbr

#endif  // JBR_GAMES_HPP
