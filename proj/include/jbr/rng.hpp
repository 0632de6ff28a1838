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

#ifndef JBR_RNG_HPP
#define JBR_RNG_HPP

#include <cstdint>
#include <random>
#include <span>

namespace jbr {

// Mixes a master seed with a stream index (splitmix64 finalizer). Used to
// derive independent, reproducible streams for shards, iterations and players.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

// Thin wrapper around mt19937_64. Uniform draws are built from raw bits so
// sequences do not depend on the standard library's distribution code.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Samples an index from a probability vector by inverse CDF. Falls back to
  // the last index with positive mass to absorb rounding in the tail.
  int sample(std::span<const double> probs) {
    const double u = uniform();
    double acc = 0.0;
    int last_positive = 0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
      if (probs[k] <= 0.0) continue;
      last_positive = static_cast<int>(k);
      acc += probs[k];
      if (u < acc) return static_cast<int>(k);
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace jbr

#endif  // JBR_RNG_HPP
