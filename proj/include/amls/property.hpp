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

#ifndef AMLS_PROPERTY_HPP
#define AMLS_PROPERTY_HPP

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "amls/matrix.hpp"
#include "amls/network.hpp"

namespace amls {

/// s(x) = max_{i != c} z(x)_i - z(x)_c over the network logits.
struct AdversarialMargin {
  std::shared_ptr<const Network> network;
  std::size_t true_class = 0;
};

/// s(x) = a.x - b
struct LinearThreshold {
  std::vector<double> a;
  double b = 0.0;
};

/// s(x) = max_j (a_j.x - b_j)
struct MaxOfLinear {
  std::vector<LinearThreshold> terms;
};

/// Closed-form test properties addressable by name.
struct AnalyticBuiltin {
  enum class Name {
    /// s(x) = -1 - ||x - center||_inf, negative everywhere.
    kNegLinfDistance,
  };
  Name name = Name::kNegLinfDistance;
  std::vector<double> center;
};

/// The property function whose nonnegativity is the violation event. The
/// boundary s(x) == 0 counts as a violation.
class PropertySpec {
 public:
  using Variant =
      std::variant<AdversarialMargin, LinearThreshold, MaxOfLinear, AnalyticBuiltin>;

  /// Each factory validates its parameters and throws ConfigError.
  static PropertySpec adversarial_margin(std::shared_ptr<const Network> net,
                                         std::size_t true_class);
  static PropertySpec linear_threshold(std::vector<double> a, double b);
  static PropertySpec max_of_linear(std::vector<LinearThreshold> terms);
  static PropertySpec neg_linf_distance(std::vector<double> center);

  std::size_t dimension() const { return dimension_; }
  std::string kind_name() const;
  const Variant& variant() const { return spec_; }

  /// s(x) for one point. Throws UsageError on dimension mismatch.
  double evaluate(std::span<const double> x) const;

  /// s(x) for every row. Parallel over rows.
  std::vector<double> evaluate(const Matrix& batch) const;

 private:
  PropertySpec(Variant spec, std::size_t dimension)
      : spec_(std::move(spec)), dimension_(dimension) {}

  Variant spec_;
  std::size_t dimension_;
};

/// max_{i != c} z_i - z_c. Requires z.size() >= 2.
double margin_from_logits(std::span<const double> logits, std::size_t true_class);

/// Smallest index attaining the maximal logit at x_ref.
std::size_t infer_true_class(const Network& net, std::span<const double> x_ref);

}  // namespace amls

#endif  // AMLS_PROPERTY_HPP
