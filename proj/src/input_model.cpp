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

#include "amls/input_model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "amls/errors.hpp"

namespace amls {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_finite(std::span<const double> v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!std::isfinite(v[i])) {
      throw ConfigError(std::string(what) + "[" + std::to_string(i) +
                        "] is not finite");
    }
  }
}

void check_box(std::span<const double> lower, std::span<const double> upper,
               const char* what) {
  if (lower.empty()) throw ConfigError(std::string(what) + ": dimension is 0");
  if (lower.size() != upper.size()) {
    throw ConfigError(std::string(what) + ": lower has " +
                      std::to_string(lower.size()) + " entries, upper has " +
                      std::to_string(upper.size()));
  }
  for (std::size_t i = 0; i < lower.size(); ++i) {
    if (!(lower[i] < upper[i])) {
      throw ConfigError(std::string(what) + ": empty support in coordinate " +
                        std::to_string(i));
    }
  }
}

}  // namespace

std::string to_string(InputModelKind kind) {
  switch (kind) {
    case InputModelKind::kUniformBox:
      return "uniform-box";
    case InputModelKind::kUniformLinfBall:
      return "uniform-linf-ball";
    case InputModelKind::kStandardNormal:
      return "standard-normal";
  }
  return "unknown";
}

InputModel InputModel::uniform_box(std::vector<double> lower,
                                   std::vector<double> upper) {
  check_finite(lower, "lower");
  check_finite(upper, "upper");
  check_box(lower, upper, "uniform-box");
  InputModel m;
  m.kind_ = InputModelKind::kUniformBox;
  m.lower_ = std::move(lower);
  m.upper_ = std::move(upper);
  return m;
}

InputModel InputModel::linf_ball(std::vector<double> center, double radius,
                                 std::optional<Box> clip) {
  check_finite(center, "center");
  if (center.empty()) throw ConfigError("uniform-linf-ball: dimension is 0");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw ConfigError("uniform-linf-ball: radius must be positive and finite");
  }
  const std::size_t d = center.size();
  std::vector<double> lower(d), upper(d);
  for (std::size_t i = 0; i < d; ++i) {
    lower[i] = center[i] - radius;
    upper[i] = center[i] + radius;
  }
  if (clip) {
    if (clip->lower.size() != d || clip->upper.size() != d) {
      throw ConfigError("uniform-linf-ball: clip box dimension differs from center");
    }
    for (std::size_t i = 0; i < d; ++i) {
      lower[i] = std::max(lower[i], clip->lower[i]);
      upper[i] = std::min(upper[i], clip->upper[i]);
    }
  }
  check_box(lower, upper, "uniform-linf-ball");
  InputModel m;
  m.kind_ = InputModelKind::kUniformLinfBall;
  m.lower_ = std::move(lower);
  m.upper_ = std::move(upper);
  m.center_ = std::move(center);
  m.radius_ = radius;
  m.clip_ = std::move(clip);
  return m;
}

InputModel InputModel::standard_normal(std::size_t dimension) {
  if (dimension == 0) throw ConfigError("standard-normal: dimension is 0");
  InputModel m;
  m.kind_ = InputModelKind::kStandardNormal;
  m.lower_.assign(dimension, -kInf);
  m.upper_.assign(dimension, kInf);
  return m;
}

bool InputModel::contains(std::span<const double> x) const {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return false;
  }
  return true;
}

bool InputModel::in_support(std::span<const double> x) const {
  if (x.size() != dimension()) {
    throw UsageError("in_support: point has dimension " +
                     std::to_string(x.size()) + ", model has " +
                     std::to_string(dimension()));
  }
  return contains(x);
}

double InputModel::log_density_ratio(std::span<const double> to,
                                     std::span<const double> from) const {
  if (!contains(to)) return -kInf;
  if (kind_ != InputModelKind::kStandardNormal) return 0.0;
  double acc = 0.0;
  for (std::size_t i = 0; i < to.size(); ++i) {
    acc += from[i] * from[i] - to[i] * to[i];
  }
  return 0.5 * acc;
}

void InputModel::sample(std::span<double> out, Engine& rng) const {
  if (kind_ == InputModelKind::kStandardNormal) {
    std::normal_distribution<double> normal(0.0, 1.0);
    for (double& v : out) v = normal(rng);
    return;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i] = lower_[i] + (upper_[i] - lower_[i]) * unit(rng);
  }
}

Matrix InputModel::sample_prior(std::size_t n, Engine& rng) const {
  if (n == 0) throw ConfigError("sample_prior: n must be at least 1");
  Matrix out(n, dimension());
  for (std::size_t i = 0; i < n; ++i) sample(out.row(i), rng);
  return out;
}

double InputModel::smallest_side() const {
  if (kind_ == InputModelKind::kStandardNormal) return 2.0;
  double side = kInf;
  for (std::size_t i = 0; i < lower_.size(); ++i) {
    side = std::min(side, upper_[i] - lower_[i]);
  }
  return side;
}

}  // namespace amls
