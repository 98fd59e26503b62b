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

#include "amls/oracle.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "amls/errors.hpp"

namespace amls {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Neumaier-compensated accumulator.
class CompensatedSum {
 public:
  void add(long double v) {
    const long double t = sum_ + v;
    if (std::fabs(sum_) >= std::fabs(v)) {
      comp_ += (sum_ - t) + v;
    } else {
      comp_ += (v - t) + sum_;
    }
    sum_ = t;
  }
  long double value() const { return sum_ + comp_; }

 private:
  long double sum_ = 0.0L;
  long double comp_ = 0.0L;
};

// Irwin-Hall CDF F_d(x) for 0 <= x <= d / 2.
long double irwin_hall_cdf_lower_half(std::size_t d, long double x) {
  const auto dd = static_cast<long double>(d);
  CompensatedSum sum;
  const auto kmax = static_cast<std::size_t>(std::floor(x));
  for (std::size_t k = 0; k <= kmax; ++k) {
    const long double base = x - static_cast<long double>(k);
    if (base <= 0.0L) break;
    const long double log_mag = dd * std::log(base) -
                                std::lgamma(static_cast<long double>(k) + 1.0L) -
                                std::lgamma(dd - static_cast<long double>(k) + 1.0L);
    const long double term = std::exp(log_mag);
    sum.add(k % 2 == 0 ? term : -term);
  }
  return sum.value();
}

std::vector<double> filled(std::size_t d, double v) { return std::vector<double>(d, v); }

OracleProblem irwin_hall_problem(const std::string& name, std::size_t d, double b) {
  return {name, InputModel::uniform_box(filled(d, 0.0), filled(d, 1.0)),
          PropertySpec::linear_threshold(filled(d, 1.0), b), irwin_hall_tail(d, b)};
}

OracleProblem gaussian_problem(const std::string& name, std::vector<double> a, double b) {
  const double truth = gaussian_halfspace_tail(a, b);
  const std::size_t d = a.size();
  return {name, InputModel::standard_normal(d),
          PropertySpec::linear_threshold(std::move(a), b), truth};
}

}  // namespace

double irwin_hall_tail(std::size_t d, double b) {
  if (d == 0) throw DomainError("irwin_hall_tail: dimension must be positive");
  const auto dd = static_cast<double>(d);
  if (!(b >= 0.0 && b <= dd)) {
    throw DomainError("irwin_hall_tail: threshold " + std::to_string(b) +
                      " outside [0, " + std::to_string(d) + "]");
  }
  // P(S >= b) = F(d - b) by symmetry of the sum about d / 2.
  const double x = dd - b;
  if (x <= 0.0) return kNegInf;
  if (x >= dd) return 0.0;
  if (x <= 1.0) return dd * std::log(x) - std::lgamma(dd + 1.0);
  if (d > kIrwinHallMaxAlternatingDim) {
    throw DomainError("irwin_hall_tail: d > 30 supports only thresholds b >= d - 1");
  }
  if (x <= 0.5 * dd) {
    return static_cast<double>(std::log(irwin_hall_cdf_lower_half(d, x)));
  }
  return static_cast<double>(std::log1p(-irwin_hall_cdf_lower_half(d, dd - x)));
}

double log_normal_upper_tail(double t) {
  constexpr double kInvSqrt2 = 0.70710678118654752440;
  if (t < 0.0) return std::log1p(-0.5 * std::erfc(-t * kInvSqrt2));
  if (t <= 20.0) return std::log(0.5 * std::erfc(t * kInvSqrt2));
  // Mills ratio by its continued fraction R(t) = 1/(t+ 1/(t+ 2/(t+ 3/(t+...)))).
  double frac = t;
  for (int k = 200; k >= 1; --k) frac = t + k / frac;
  const double log_pdf = -0.5 * t * t - 0.5 * std::log(2.0 * std::numbers::pi);
  return log_pdf - std::log(frac);
}

double gaussian_halfspace_tail(std::span<const double> a, double b) {
  double norm2 = 0.0;
  for (double v : a) norm2 += v * v;
  if (!(norm2 > 0.0)) throw DomainError("gaussian_halfspace_tail: a is zero");
  return log_normal_upper_tail(b / std::sqrt(norm2));
}

OracleProblem impossible_event() {
  constexpr std::size_t kDim = 10;
  return {"impossible-event", InputModel::linf_ball(filled(kDim, 0.5), 0.5),
          PropertySpec::neg_linf_distance(filled(kDim, 0.5)), kNegInf};
}

std::vector<std::string> oracle_names() {
  return {"uniform-half",
          "irwin-hall-2-1",
          "irwin-hall-5-4",
          "irwin-hall-10-9.5",
          "gaussian-halfspace-3-4-5",
          "gaussian-halfspace-1-6",
          "impossible-event"};
}

OracleProblem oracle_by_name(const std::string& name) {
  if (name == "uniform-half") return irwin_hall_problem(name, 1, 0.5);
  if (name == "irwin-hall-2-1") return irwin_hall_problem(name, 2, 1.0);
  if (name == "irwin-hall-5-4") return irwin_hall_problem(name, 5, 4.0);
  if (name == "irwin-hall-10-9.5") return irwin_hall_problem(name, 10, 9.5);
  if (name == "gaussian-halfspace-3-4-5") return gaussian_problem(name, {3.0, 4.0}, 5.0);
  if (name == "gaussian-halfspace-1-6") return gaussian_problem(name, {1.0}, 6.0);
  if (name == "impossible-event") return impossible_event();
  throw ConfigError("unknown oracle problem '" + name + "'");
}

}  // namespace amls
