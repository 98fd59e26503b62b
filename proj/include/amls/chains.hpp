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

#ifndef AMLS_CHAINS_HPP
#define AMLS_CHAINS_HPP

#include <cstddef>
#include <vector>

#include "amls/matrix.hpp"

namespace amls {

/// The N live sampler states. Row i of `positions` has property value
/// values[i], proposal radius widths[i] and acceptance fraction
/// acceptance[i] over the most recent sweep.
struct ChainPopulation {
  Matrix positions;
  std::vector<double> values;
  std::vector<double> widths;
  std::vector<double> acceptance;

  std::size_t size() const { return positions.rows(); }
  std::size_t dimension() const { return positions.cols(); }

  bool operator==(const ChainPopulation&) const = default;
};

}  // namespace amls

#endif  // AMLS_CHAINS_HPP
