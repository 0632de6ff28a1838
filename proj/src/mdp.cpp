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

#include "jbr/mdp.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace jbr {

int TabularMdp::add_state(int num_actions) {
  const std::size_t begin = action_offset.back();
  action_offset.push_back(begin + static_cast<std::size_t>(num_actions));
  reward.resize(action_offset.back(), 0.0);
  successors.resize(action_offset.back());
  supported.resize(action_offset.back(), false);
  return num_states() - 1;
}

void TabularMdp::validate(double tol) const {
  for (std::size_t sa = 0; sa < num_pairs(); ++sa) {
    if (!supported[sa]) continue;
    double total = 0.0;
    for (const auto& next : successors[sa]) {
      if (next.state != kTerminalState && (next.state < 0 || next.state >= num_states())) {
        throw std::logic_error("successor outside the state space");
      }
      total += next.prob;
    }
    if (std::abs(total - 1.0) > tol) {
      throw std::logic_error("transition row " + std::to_string(sa) + " sums to " +
                             std::to_string(total));
    }
  }
}

}  // namespace jbr
