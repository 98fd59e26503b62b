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

#ifndef AMLS_ORACLE_HPP
#define AMLS_ORACLE_HPP

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "amls/input_model.hpp"
#include "amls/property.hpp"

namespace amls {

/// A problem whose violation probability is known in closed form.
struct OracleProblem {
  std::string name;
  InputModel model;
  PropertySpec spec;
  /// Natural log of the true probability; -inf for impossible events.
  double log_true_prob;
};

/// Largest dimension for which the alternating Irwin-Hall sum is evaluated.
inline constexpr std::size_t kIrwinHallMaxAlternatingDim = 30;

/// log P(U_1 + ... + U_d >= b) for i.i.d. uniform[0,1] U_i.
///
/// Uses the alternating-sum CDF with compensated summation on whichever side
/// of the mean keeps every term below (d/2)^d / d!. Thresholds within one
/// unit of d use the exact corner term (d - b)^d / d!, which is the only
/// form supported beyond kIrwinHallMaxAlternatingDim. Throws DomainError for
/// b outside [0, d].
double irwin_hall_tail(std::size_t d, double b);

/// log P(Z >= t) for standard normal Z, accurate for |t| up to at least 40.
double log_normal_upper_tail(double t);

/// log P(a.X >= b) for X standard normal in dim(a): log Phi_bar(b / |a|).
/// Throws DomainError when a is zero.
double gaussian_halfspace_tail(std::span<const double> a, double b);

/// s(x) = -1 - ||x - c||_inf over the 10-dimensional unit cube (ball of
/// radius 0.5 around c = (0.5, ..., 0.5)); never violated.
OracleProblem impossible_event();

/// Named problems for self-tests.
std::vector<std::string> oracle_names();
/// Throws ConfigError for an unknown name.
OracleProblem oracle_by_name(const std::string& name);

}  // namespace amls

#endif  // AMLS_ORACLE_HPP
