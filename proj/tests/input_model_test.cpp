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

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "amls/errors.hpp"
#include "test_util.hpp"

namespace amls {
namespace {

InputModel unit_box(std::size_t d) {
  return InputModel::uniform_box(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0));
}

TEST(InputModelTest, BoxSamplesStayInSupport) {
  const auto model = unit_box(1);
  Engine rng(42);
  const Matrix x = model.sample_prior(3, rng);
  ASSERT_EQ(x.rows(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_GE(x(i, 0), 0.0);
    EXPECT_LE(x(i, 0), 1.0);
  }
}

TEST(InputModelTest, ClippedBallSamplesStayInIntersection) {
  const auto model = InputModel::linf_ball({0.5, 0.5}, 0.1, Box{{0.0, 0.0}, {1.0, 1.0}});
  Engine rng(3);
  const Matrix x = model.sample_prior(10000, rng);
  for (std::size_t i = 0; i < x.rows(); ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      EXPECT_GE(x(i, j), 0.4);
      EXPECT_LE(x(i, j), 0.6);
    }
    EXPECT_TRUE(model.in_support(x.row(i)));
  }
}

TEST(InputModelTest, ClipShrinksTheBallToTheBoxIntersection) {
  const auto model = InputModel::linf_ball({0.05, 0.95}, 0.1, Box{{0.0, 0.0}, {1.0, 1.0}});
  EXPECT_DOUBLE_EQ(model.lower()[0], 0.0);
  EXPECT_DOUBLE_EQ(model.upper()[0], 0.05 + 0.1);
  EXPECT_DOUBLE_EQ(model.lower()[1], 0.95 - 0.1);
  EXPECT_DOUBLE_EQ(model.upper()[1], 1.0);
  EXPECT_NEAR(model.smallest_side(), 0.15, 1e-15);
}

TEST(InputModelTest, UniformBoxMeanConverges) {
  const auto model = unit_box(2);
  Engine rng = make_stream(11, StreamTag::kTest);
  const Matrix x = model.sample_prior(1'000'000, rng);
  for (std::size_t j = 0; j < 2; ++j) {
    double sum = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i) sum += x(i, j);
    EXPECT_NEAR(sum / static_cast<double>(x.rows()), 0.5, 0.002);
  }
}

TEST(InputModelTest, UniformBoxMatchesLinearCdf) {
  const auto model =
      InputModel::uniform_box({-1.0, 2.0, 0.0}, {1.0, 2.5, 10.0});
  Engine rng = make_stream(5, StreamTag::kTest);
  const Matrix x = model.sample_prior(100'000, rng);
  for (std::size_t j = 0; j < 3; ++j) {
    std::vector<double> col(x.rows());
    for (std::size_t i = 0; i < x.rows(); ++i) col[i] = x(i, j);
    const double lo = model.lower()[j], hi = model.upper()[j];
    const double ks =
        testing::ks_statistic(col, [&](double v) { return (v - lo) / (hi - lo); });
    EXPECT_LT(ks, 0.01) << "coordinate " << j;
  }
}

TEST(InputModelTest, SameSeedGivesIdenticalSamples) {
  const auto model = InputModel::linf_ball({0.2, -0.3, 4.0}, 0.7);
  Engine a = make_stream(99, StreamTag::kPrior);
  Engine b = make_stream(99, StreamTag::kPrior);
  EXPECT_EQ(model.sample_prior(500, a), model.sample_prior(500, b));
}

TEST(InputModelTest, InSupportUsesClosedBoundaries) {
  const auto box = unit_box(2);
  EXPECT_TRUE(box.in_support(std::vector{0.5, 0.5}));
  EXPECT_FALSE(box.in_support(std::vector{1.0001, 0.5}));
  EXPECT_TRUE(box.in_support(std::vector{1.0, 0.0}));

  const auto ball = InputModel::linf_ball({0.0, 0.0, 0.0}, 0.1);
  EXPECT_TRUE(ball.in_support(std::vector{0.1, -0.1, 0.05}));
  EXPECT_FALSE(ball.in_support(std::vector{0.1, -0.1000001, 0.05}));
}

TEST(InputModelTest, InSupportRejectsDimensionMismatch) {
  EXPECT_THROW(unit_box(2).in_support(std::vector{0.5}), UsageError);
}

TEST(InputModelTest, InvalidModelsAreConfigErrors) {
  EXPECT_THROW(InputModel::uniform_box({0.0, 1.0}, {1.0, 1.0}), ConfigError);
  EXPECT_THROW(InputModel::uniform_box({0.0}, {1.0, 2.0}), ConfigError);
  EXPECT_THROW(InputModel::uniform_box({}, {}), ConfigError);
  EXPECT_THROW(InputModel::linf_ball({0.0}, 0.0), ConfigError);
  EXPECT_THROW(InputModel::linf_ball({0.0}, -1.0), ConfigError);
  // Ball around 2.0 misses the clip box [0, 1] entirely.
  EXPECT_THROW(InputModel::linf_ball({2.0}, 0.5, Box{{0.0}, {1.0}}), ConfigError);
  // Touching at a single point is still empty (zero width).
  EXPECT_THROW(InputModel::linf_ball({1.5}, 0.5, Box{{0.0}, {1.0}}), ConfigError);
  Engine rng(1);
  EXPECT_THROW(unit_box(1).sample_prior(0, rng), ConfigError);
}

TEST(InputModelTest, LogDensityRatio) {
  const auto box = unit_box(2);
  const std::vector<double> in{0.3, 0.3}, out{1.3, 0.3};
  EXPECT_EQ(box.log_density_ratio(in, in), 0.0);
  EXPECT_EQ(box.log_density_ratio(out, in), -std::numeric_limits<double>::infinity());

  const auto normal = InputModel::standard_normal(2);
  const std::vector<double> a{1.0, 2.0}, b{0.5, -1.0};
  EXPECT_DOUBLE_EQ(normal.log_density_ratio(a, b), -0.5 * (5.0 - 1.25));
  EXPECT_TRUE(normal.in_support(std::vector{1e6, -1e6}));
}

TEST(InputModelTest, StandardNormalMoments) {
  const auto model = InputModel::standard_normal(1);
  Engine rng = make_stream(8, StreamTag::kTest);
  const Matrix x = model.sample_prior(200'000, rng);
  double s = 0.0, s2 = 0.0;
  for (double v : x.data()) {
    s += v;
    s2 += v * v;
  }
  const double n = static_cast<double>(x.rows());
  EXPECT_NEAR(s / n, 0.0, 0.01);
  EXPECT_NEAR(s2 / n, 1.0, 0.02);
}

}  // namespace
}  // namespace amls
