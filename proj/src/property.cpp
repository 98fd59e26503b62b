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

#include "amls/property.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amls/errors.hpp"
#include "amls/kernels.hpp"

namespace amls {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double dot(std::span<const double> a, std::span<const double> x) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * x[i];
  return acc;
}

void check_finite(std::span<const double> v, const char* what) {
  for (double x : v) {
    if (!std::isfinite(x)) throw ConfigError(std::string(what) + " has a non-finite entry");
  }
}

}  // namespace

PropertySpec PropertySpec::adversarial_margin(std::shared_ptr<const Network> net,
                                              std::size_t true_class) {
  if (!net) throw ConfigError("adversarial-margin: network is null");
  if (net->output_dim() < 2) {
    throw ConfigError("adversarial-margin: network needs at least 2 outputs");
  }
  if (true_class >= net->output_dim()) {
    throw ConfigError("adversarial-margin: true class " + std::to_string(true_class) +
                      " out of range for " + std::to_string(net->output_dim()) +
                      " outputs");
  }
  const std::size_t d = net->input_dim();
  return {AdversarialMargin{std::move(net), true_class}, d};
}

PropertySpec PropertySpec::linear_threshold(std::vector<double> a, double b) {
  if (a.empty()) throw ConfigError("linear-threshold: empty coefficient vector");
  check_finite(a, "linear-threshold: a");
  if (!std::isfinite(b)) throw ConfigError("linear-threshold: b is not finite");
  const std::size_t d = a.size();
  return {LinearThreshold{std::move(a), b}, d};
}

PropertySpec PropertySpec::max_of_linear(std::vector<LinearThreshold> terms) {
  if (terms.empty()) throw ConfigError("max-of-linear: no terms");
  const std::size_t d = terms.front().a.size();
  if (d == 0) throw ConfigError("max-of-linear: empty coefficient vector");
  for (const auto& t : terms) {
    if (t.a.size() != d) throw ConfigError("max-of-linear: terms differ in dimension");
    check_finite(t.a, "max-of-linear: a");
    if (!std::isfinite(t.b)) throw ConfigError("max-of-linear: b is not finite");
  }
  return {MaxOfLinear{std::move(terms)}, d};
}

PropertySpec PropertySpec::neg_linf_distance(std::vector<double> center) {
  if (center.empty()) throw ConfigError("neg-linf-distance: empty center");
  check_finite(center, "neg-linf-distance: center");
  const std::size_t d = center.size();
  return {AnalyticBuiltin{AnalyticBuiltin::Name::kNegLinfDistance, std::move(center)}, d};
}

std::string PropertySpec::kind_name() const {
  return std::visit(Overloaded{
                        [](const AdversarialMargin&) { return "adversarial-margin"; },
                        [](const LinearThreshold&) { return "linear-threshold"; },
                        [](const MaxOfLinear&) { return "max-of-linear"; },
                        [](const AnalyticBuiltin&) { return "analytic-builtin"; },
                    },
                    spec_);
}

double PropertySpec::evaluate(std::span<const double> x) const {
  if (x.size() != dimension_) {
    throw UsageError("property: point has dimension " + std::to_string(x.size()) +
                     ", property expects " + std::to_string(dimension_));
  }
  return std::visit(
      Overloaded{
          [&](const AdversarialMargin& p) {
            thread_local ForwardScratch scratch;
            thread_local std::vector<double> logits;
            logits.resize(p.network->output_dim());
            p.network->forward_row(x, logits, scratch);
            return margin_from_logits(logits, p.true_class);
          },
          [&](const LinearThreshold& p) { return dot(p.a, x) - p.b; },
          [&](const MaxOfLinear& p) {
            double best = -std::numeric_limits<double>::infinity();
            for (const auto& t : p.terms) best = std::max(best, dot(t.a, x) - t.b);
            return best;
          },
          [&](const AnalyticBuiltin& p) {
            double dist = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
              dist = std::max(dist, std::abs(x[i] - p.center[i]));
            }
            return -1.0 - dist;
          },
      },
      spec_);
}

std::vector<double> PropertySpec::evaluate(const Matrix& batch) const {
  return kernels::omp::evaluate_batch(*this, batch);
}

double margin_from_logits(std::span<const double> logits, std::size_t true_class) {
  double best_other = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < logits.size(); ++i) {
    if (i != true_class) best_other = std::max(best_other, logits[i]);
  }
  return best_other - logits[true_class];
}

std::size_t infer_true_class(const Network& net, std::span<const double> x_ref) {
  std::vector<double> logits(net.output_dim());
  ForwardScratch scratch;
  net.forward_row(x_ref, logits, scratch);
  return static_cast<std::size_t>(
      std::max_element(logits.begin(), logits.end()) - logits.begin());
}

}  // namespace amls
