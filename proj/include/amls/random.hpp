// Copyright 2026 The amls-verify Authors. All rights reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef AMLS_RANDOM_HPP
#define AMLS_RANDOM_HPP

#include <cstdint>
#include <random>

namespace amls {

using Engine = std::mt19937_64;

/// Purposes a substream can be drawn for. Distinct tags give unrelated
/// streams under the same run seed.
enum class StreamTag : std::uint64_t {
  kPrior = 1,
  kResample = 2,
  kSweep = 3,
  kNaiveMc = 4,
  kNetworkInit = 5,
  kSweepCell = 6,
  kTest = 99,
};

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Seed of the substream identified by (seed, tag, a, b). Pure function, so
/// a chain's stream does not depend on which thread advances it.
constexpr std::uint64_t derive_seed(std::uint64_t seed, StreamTag tag,
                                    std::uint64_t a = 0, std::uint64_t b = 0) {
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ static_cast<std::uint64_t>(tag));
  h = mix64(h ^ a);
  return mix64(h ^ b);
}

inline Engine make_stream(std::uint64_t seed, StreamTag tag,
                          std::uint64_t a = 0, std::uint64_t b = 0) {
  return Engine(derive_seed(seed, tag, a, b));
}

}  // namespace amls

#endif  // AMLS_RANDOM_HPP
