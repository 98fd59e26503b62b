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

#ifndef AMLS_INPUT_MODEL_HPP
#define AMLS_INPUT_MODEL_HPP

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "amls/matrix.hpp"
#include "amls/random.hpp"

namespace amls {

enum class InputModelKind { kUniformBox, kUniformLinfBall, kStandardNormal };

std::string to_string(InputModelKind kind);

struct Box {
  std::vector<double> lower;
  std::vector<double> upper;
};

/// Distribution p(x) over the input subdomain searched for violations.
///
/// Uniform models have constant density on a closed axis-aligned support box.
/// An l-infinity ball intersected with an optional clip box is itself a box,
/// so both uniform kinds sample that box directly. The standard-normal kind
/// exists to exercise non-uniform densities through log_density_ratio.
///
/// Immutable after construction.
class InputModel {
 public:
  /// Throws ConfigError unless lower[i] < upper[i] for every coordinate.
  static InputModel uniform_box(std::vector<double> lower,
                                std::vector<double> upper);

  /// Throws ConfigError if radius <= 0 or the clipped support is empty.
  static InputModel linf_ball(std::vector<double> center, double radius,
                              std::optional<Box> clip = std::nullopt);

  static InputModel standard_normal(std::size_t dimension);

  InputModelKind kind() const { return kind_; }
  std::size_t dimension() const { return lower_.size(); }

  /// Effective support box; infinite for the normal model.
  std::span<const double> lower() const { return lower_; }
  std::span<const double> upper() const { return upper_; }

  /// Ball parameters; empty / zero for other kinds.
  std::span<const double> center() const { return center_; }
  double radius() const { return radius_; }
  const std::optional<Box>& clip() const { return clip_; }

  /// Closed support membership. Throws UsageError on dimension mismatch.
  bool in_support(std::span<const double> x) const;

  /// log p(to) - log p(from). -inf when `to` leaves the support; 0 between
  /// two support points of a uniform model.
  double log_density_ratio(std::span<const double> to,
                           std::span<const double> from) const;

  /// Writes one exact draw into `out` (size = dimension).
  void sample(std::span<double> out, Engine& rng) const;

  /// n i.i.d. draws, one per row. Throws ConfigError if n == 0.
  Matrix sample_prior(std::size_t n, Engine& rng) const;

  /// Length of the shortest support side; 2 for the normal model (a
  /// one-sigma window either side of the mean).
  double smallest_side() const;

 private:
  InputModel() = default;

  bool contains(std::span<const double> x) const;

  InputModelKind kind_ = InputModelKind::kUniformBox;
  std::vector<double> lower_;
  std::vector<double> upper_;
  std::vector<double> center_;
  double radius_ = 0.0;
  std::optional<Box> clip_;
};

}  // namespace amls

#endif  // AMLS_INPUT_MODEL_HPP
