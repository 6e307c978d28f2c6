// Copyright 2026 The telesim Authors
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

#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace telesim {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seeded random stream. Streams are never shared between workers; a worker
// derives its own substream from the run seed and its coordinates, so results
// do not depend on scheduling.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  /// Independent substream keyed by (seed, i, j, ...).
  static RandomStream derive(std::uint64_t seed, std::initializer_list<std::uint64_t> path) {
    std::uint64_t h = splitmix64(seed);
    for (auto p : path) h = splitmix64(h ^ splitmix64(p + 0x5851F42D4C957F2DULL));
    return RandomStream(h);
  }

  /// Uniform in [0, 1).
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  std::uint64_t binomial(std::uint64_t trials, double p) {
    if (p <= 0.0) return 0;
    if (p >= 1.0) return trials;
    return std::binomial_distribution<std::uint64_t>(trials, p)(engine_);
  }

  std::uint32_t below(std::uint32_t n) {
    return std::uniform_int_distribution<std::uint32_t>(0, n - 1)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace telesim
