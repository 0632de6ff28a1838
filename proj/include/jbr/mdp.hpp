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

#ifndef JBR_MDP_HPP
#define JBR_MDP_HPP

#include <cstddef>
#include <vector>

namespace jbr {

inline constexpr int kTerminalState = -1;

struct Successor {
  int state = kTerminalState;  // kTerminalState is absorbing with value 0
  double prob = 0.0;
  double discount = 1.0;       // applied to the successor's value
};

// Finite MDP in flat (state, action) layout. Pairs outside `supported` have
// no model (used by offline estimates); exact models support every pair.
struct TabularMdp {
  std::vector<std::size_t> action_offset{0};  // size num_states + 1
  std::vector<double> reward;                 // per pair
  std::vector<std::vector<Successor>> successors;  // per pair
  std::vector<bool> supported;                // per pair

  int num_states() const { return static_cast<int>(action_offset.size()) - 1; }
  int num_actions(int s) const {
    return static_cast<int>(action_offset[static_cast<std::size_t>(s) + 1] -
                            action_offset[static_cast<std::size_t>(s)]);
  }
  std::size_t pair(int s, int a) const {
    return action_offset[static_cast<std::size_t>(s)] + static_cast<std::size_t>(a);
  }
  std::size_t num_pairs() const { return reward.size(); }

  // Appends a state with `num_actions` unsupported, empty pairs.
  int add_state(int num_actions);

  // Throws std::logic_error unless every supported row sums to one within
  // `tol` and targets existing states.
  void validate(double tol = 1e-9) const;
};

}  // namespace jbr

#endif  // JBR_MDP_HPP
