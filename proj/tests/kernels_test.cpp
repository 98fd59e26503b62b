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

#include "amls/kernels.hpp"

#include <gtest/gtest.h>

#include <array>
#include <memory>

#include "amls/errors.hpp"
#include "amls/network.hpp"
#include "amls/oracle.hpp"
#include "amls/property.hpp"
#include "amls/random.hpp"

namespace amls {
namespace {

std::shared_ptr<const Network> small_net() {
  const std::array<std::size_t, 4> widths{6, 24, 24, 4};
  return std::make_shared<const Network>(random_dense_relu(widths, 31));
}

Matrix random_batch(std::size_t rows, std::size_t cols, std::uint64_t seed) {
  Engine rng = make_stream(seed, StreamTag::kTest);
  std::uniform_real_distribution<double> u(-1, 1);
  Matrix m(rows, cols);
  for (double& v : m.data()) v = u(rng);
  return m;
}

ChainPopulation start_population(const InputModel& model, const PropertySpec& spec,
                                 std::size_t n, std::uint64_t seed) {
  Engine rng = make_stream(seed, StreamTag::kTest);
  ChainPopulation pop;
  pop.positions = model.sample_prior(n, rng);
  pop.values = spec.evaluate(pop.positions);
  pop.widths.assign(n, 0.2);
  pop.acceptance.assign(n, 0.0);
  return pop;
}

TEST(KernelsTest, ForwardBatchSerialMatchesParallel) {
  const auto net = small_net();
  const Matrix batch = random_batch(517, 6, 1);
  EXPECT_EQ(kernels::serial::forward_batch(*net, batch), kernels::omp::forward_batch(*net, batch));
}

TEST(KernelsTest, EvaluateBatchSerialMatchesParallel) {
  const auto spec = PropertySpec::adversarial_margin(small_net(), 2);
  const Matrix batch = random_batch(777, 6, 2);
  EXPECT_EQ(kernels::serial::evaluate_batch(spec, batch), kernels::omp::evaluate_batch(spec, batch));
}

TEST(KernelsTest, SweepSerialMatchesParallel) {
  const auto spec = PropertySpec::adversarial_margin(small_net(), 0);
  const auto model = InputModel::linf_ball(std::vector<double>(6, 0.0), 1.0);
  const ChainPopulation start = start_population(model, spec, 300, 3);
  double level = start.values[0];
  for (double v : start.values) level = std::min(level, v);

  ChainPopulation a = start, b = start;
  const kernels::SweepRequest req{level, 25, 0xfeedULL};
  const auto ea = kernels::serial::mh_sweep(a, model, spec, req);
  const auto eb = kernels::omp::mh_sweep(b, model, spec, req);
  EXPECT_EQ(ea, eb);
  EXPECT_EQ(a, b);
  EXPECT_NE(a.positions, start.positions);
}

TEST(KernelsTest, CountHitsSerialMatchesParallel) {
  const auto problem = oracle_by_name("irwin-hall-5-4");
  for (std::uint64_t batch : {1ULL, 999ULL, 4096ULL, 200'000ULL}) {
    const auto a = kernels::serial::count_hits(problem.model, problem.spec, 100'000, batch, 4);
    const auto b = kernels::omp::count_hits(problem.model, problem.spec, 100'000, batch, 4);
    EXPECT_EQ(a.hits, b.hits) << "batch " << batch;
    EXPECT_EQ(a.samples, 100'000u);
    EXPECT_EQ(b.samples, 100'000u);
  }
}

TEST(KernelsTest, ExceptionsInsideParallelRegionPropagate) {
  const double big = 1e308;
  const auto net = std::make_shared<const Network>(
      1, std::vector{Layer::dense(1, 2, {big, big}, {0, 0}), Layer::relu(2),
                     Layer::dense(2, 2, {big, 0, 0, big}, {0, 0})});
  const auto spec = PropertySpec::adversarial_margin(net, 0);
  Matrix batch(64, 1, 10.0);
  EXPECT_THROW(kernels::omp::evaluate_batch(spec, batch), NumericError);
  EXPECT_THROW(kernels::serial::evaluate_batch(spec, batch), NumericError);
  EXPECT_THROW(kernels::omp::forward_batch(*net, batch), NumericError);
  EXPECT_GE(kernels::max_threads(), 1);
}

}  // namespace
}  // namespace amls
