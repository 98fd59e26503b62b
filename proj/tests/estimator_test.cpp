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

#include "amls/estimator.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numeric>

#include "amls/oracle.hpp"

namespace amls {
namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

InputModel unit_box(std::size_t d) {
  return InputModel::uniform_box(std::vector<double>(d, 0.0), std::vector<double>(d, 1.0));
}

ChainPopulation population(std::initializer_list<std::vector<double>> rows,
                           std::vector<double> values, double width) {
  ChainPopulation pop;
  pop.positions = Matrix(rows.size(), rows.begin()->size());
  std::size_t i = 0;
  for (const auto& r : rows) std::copy(r.begin(), r.end(), pop.positions.row(i++).begin());
  pop.values = std::move(values);
  pop.widths.assign(rows.size(), width);
  pop.acceptance.assign(rows.size(), 0.0);
  return pop;
}

// ---------------------------------------------------------------------------
// update_level

TEST(UpdateLevelTest, ClampsAtZero) {
  const std::vector<double> v{10, 9, 8, 7, 6, 5, 4, 3, 2, 1};
  EXPECT_EQ(update_level(v, 0.3), 0.0);
}

TEST(UpdateLevelTest, PicksOneBasedQuantile) {
  const std::vector<double> v{-1, -2, -3, -4, -5, -6, -7, -8, -9, -10};
  EXPECT_EQ(update_level(v, 0.3), -3.0);
}

TEST(UpdateLevelTest, DegenerateQuantileTakesMinimum) {
  const std::vector<double> v{-1, -2, -3, -4};
  EXPECT_EQ(update_level(v, 0.999999), -3.0);  // floor(0.999999 * 4) = 3
  EXPECT_EQ(quantile_index(1.0, 4), 4u);
  EXPECT_EQ(update_level(std::vector<double>{-1, -2, -3, -4}, 1.0), -4.0);
}

TEST(UpdateLevelTest, QuantileIndexAbsorbsProductRounding) {
  EXPECT_EQ(quantile_index(0.29, 100), 29u);
  EXPECT_EQ(quantile_index(0.1, 10000), 1000u);
  EXPECT_EQ(quantile_index(0.3, 10), 3u);
  EXPECT_EQ(quantile_index(0.01, 10), 1u);  // clamped
}

TEST(UpdateLevelTest, KeepsAtLeastRhoFraction) {
  Engine rng = make_stream(6, StreamTag::kTest);
  std::normal_distribution<double> normal;
  for (double rho : {0.1, 0.25, 0.5}) {
    std::vector<double> v(997);
    for (double& x : v) x = normal(rng) - 3.0;
    std::sort(v.begin(), v.end(), std::greater<>());
    const double level = update_level(v, rho);
    const auto kept = std::count_if(v.begin(), v.end(), [&](double x) { return x >= level; });
    EXPECT_GE(static_cast<double>(kept) / 997.0, std::floor(rho * 997) / 997.0);
  }
}

// ---------------------------------------------------------------------------
// adapt_proposal

TEST(AdaptProposalTest, HalvesGrowsOrKeeps) {
  AmlsConfig cfg;
  ChainPopulation pop = population({{0.0}, {0.0}, {0.0}}, {0, 0, 0}, 0.1);
  pop.acceptance = {0.1, 0.5, 0.234};
  adapt_proposal(pop, cfg);
  EXPECT_DOUBLE_EQ(pop.widths[0], 0.05);
  EXPECT_DOUBLE_EQ(pop.widths[1], 0.102);
  EXPECT_EQ(pop.widths[2], 0.1);
  EXPECT_EQ(pop.acceptance, (std::vector<double>{0, 0, 0}));
}

// ---------------------------------------------------------------------------
// resample_survivors

TEST(ResampleTest, SingleSurvivorFillsPopulation) {
  ChainPopulation pop = population({{0.1}, {0.2}, {0.3}, {0.4}}, {-5, -4, 2, -3}, 0.1);
  pop.widths = {1, 2, 3, 4};
  Engine rng(1);
  const ChainPopulation out = resample_survivors(pop, 0.0, rng);
  ASSERT_EQ(out.size(), 4u);
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(out.positions(i, 0), 0.3);
    EXPECT_EQ(out.values[i], 2.0);
    EXPECT_EQ(out.widths[i], 3.0);
  }
}

TEST(ResampleTest, AllSurvivorsGiveBootstrap) {
  ChainPopulation pop = population({{1.0}, {2.0}, {3.0}, {4.0}, {5.0}}, {1, 2, 3, 4, 5}, 0.1);
  pop.widths = {10, 20, 30, 40, 50};
  Engine rng(2);
  const ChainPopulation out = resample_survivors(pop, 0.5, rng);
  ASSERT_EQ(out.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) {
    const double x = out.positions(i, 0);
    EXPECT_EQ(out.values[i], x);
    EXPECT_EQ(out.widths[i], 10.0 * x);
  }
}

TEST(ResampleTest, TwoSurvivorsEquallyLikely) {
  ChainPopulation pop = population({{0.0}, {1.0}, {2.0}, {3.0}}, {0.5, -1, 0.7, -2}, 0.1);
  Engine rng = make_stream(3, StreamTag::kTest);
  std::size_t first = 0, total = 0;
  while (total < 100'000) {
    const ChainPopulation out = resample_survivors(pop, 0.0, rng);
    for (std::size_t i = 0; i < out.size(); ++i) {
      ASSERT_TRUE(out.positions(i, 0) == 0.0 || out.positions(i, 0) == 2.0);
      first += out.positions(i, 0) == 0.0;
      ++total;
    }
  }
  EXPECT_NEAR(static_cast<double>(first) / static_cast<double>(total), 0.5, 0.02);
}

TEST(ResampleTest, NoSurvivorIsUsageError) {
  ChainPopulation pop = population({{0.0}}, {-1.0}, 0.1);
  Engine rng(0);
  EXPECT_THROW(resample_survivors(pop, 0.0, rng), UsageError);
}

// ---------------------------------------------------------------------------
// mh_sweep

TEST(MhSweepTest, OutOfSupportProposalsAreRejected) {
  const auto model = unit_box(1);
  const auto spec = PropertySpec::linear_threshold({1.0}, 0.5);
  ChainPopulation pop = population({{0.5}}, {0.0}, 1e9);
  const auto evals = mh_sweep(pop, kNegInf, model, spec, 10, 7);
  EXPECT_EQ(evals, 0u);
  EXPECT_EQ(pop.positions(0, 0), 0.5);
  EXPECT_EQ(pop.acceptance[0], 0.0);
}

TEST(MhSweepTest, InSupportProposalsAboveLevelAlwaysAccepted) {
  const auto model = InputModel::uniform_box({-1e9}, {1e9});
  const auto spec = PropertySpec::linear_threshold({1.0}, 0.0);
  ChainPopulation pop = population({{0.0}, {5.0}}, {0.0, 5.0}, 0.01);
  const auto evals = mh_sweep(pop, kNegInf, model, spec, 50, 8);
  EXPECT_EQ(evals, 100u);
  EXPECT_EQ(pop.acceptance, (std::vector<double>{1.0, 1.0}));
  EXPECT_NE(pop.positions(0, 0), 0.0);
  EXPECT_EQ(pop.values[1], pop.positions(1, 0));
}

TEST(MhSweepTest, InactiveLevelSamplesThePrior) {
  const auto model = unit_box(1);
  const auto spec = PropertySpec::linear_threshold({1.0}, 0.5);
  ChainPopulation pop = population({{0.9}}, {0.4}, 0.5);
  double sum = 0.0;
  constexpr int kSteps = 10'000;
  for (int step = 0; step < kSteps; ++step) {
    mh_sweep(pop, kNegInf, model, spec, 1, derive_seed(11, StreamTag::kTest, step));
    sum += pop.positions(0, 0);
  }
  EXPECT_NEAR(sum / kSteps, 0.5, 0.02);
}

TEST(MhSweepTest, ChainsStayAboveLevelAndInSupport) {
  const auto model = unit_box(3);
  const auto spec = PropertySpec::linear_threshold({1.0, 1.0, 1.0}, 2.0);
  Engine rng = make_stream(4, StreamTag::kTest);
  ChainPopulation pop;
  pop.positions = Matrix(200, 3);
  for (std::size_t i = 0; i < 200; ++i) {
    for (double& v : pop.positions.row(i)) v = 0.8 + 0.2 * std::uniform_real_distribution<>()(rng);
  }
  pop.values = spec.evaluate(pop.positions);
  pop.widths.assign(200, 0.3);
  pop.acceptance.assign(200, 0.0);
  const double level = -0.5;
  mh_sweep(pop, level, model, spec, 40, 5);
  for (std::size_t i = 0; i < 200; ++i) {
    EXPECT_GE(pop.values[i], level);
    EXPECT_TRUE(model.in_support(pop.positions.row(i)));
    EXPECT_EQ(pop.values[i], spec.evaluate(pop.positions.row(i)));
    EXPECT_GE(pop.acceptance[i], 0.0);
    EXPECT_LE(pop.acceptance[i], 1.0);
  }
}

// ---------------------------------------------------------------------------
// naive_mc

TEST(NaiveMcTest, HalfInterval) {
  const auto r = naive_mc(unit_box(1), PropertySpec::linear_threshold({1.0}, 0.5), 1'000'000,
                          65'536, 3);
  EXPECT_FALSE(r.unsat);
  EXPECT_NEAR(r.estimate(), 0.5, 0.002);
  EXPECT_DOUBLE_EQ(r.log_estimate, std::log(r.estimate()));
}

TEST(NaiveMcTest, ImpossibleEventIsSentinel) {
  const auto r = naive_mc(unit_box(2), PropertySpec::linear_threshold({0.0, 0.0}, 1.0), 10'000,
                          333, 3);
  EXPECT_TRUE(r.unsat);
  EXPECT_EQ(r.hits, 0u);
  EXPECT_EQ(r.samples, 10'000u);
  EXPECT_EQ(r.log_estimate, kNegInf);
}

TEST(NaiveMcTest, IrwinHallFiveFour) {
  const auto problem = oracle_by_name("irwin-hall-5-4");
  const auto r = naive_mc(problem.model, problem.spec, 10'000'000, 100'000, 17);
  EXPECT_NEAR(std::log10(r.estimate()), std::log10(1.0 / 120.0), 0.05);
}

TEST(NaiveMcTest, BatchSizeChangesNothingButStreams) {
  const auto problem = oracle_by_name("irwin-hall-2-1");
  const auto a = naive_mc(problem.model, problem.spec, 1001, 1001, 5);
  const auto b = naive_mc(problem.model, problem.spec, 1001, 1001, 5);
  EXPECT_EQ(a.hits, b.hits);
  EXPECT_THROW(naive_mc(problem.model, problem.spec, 0, 10, 5), ConfigError);
  EXPECT_THROW(naive_mc(problem.model, problem.spec, 10, 0, 5), ConfigError);
}

// ---------------------------------------------------------------------------
// amls_run

AmlsConfig small_config(std::size_t n, std::uint32_t m, double rho, std::uint64_t seed) {
  AmlsConfig cfg;
  cfg.n_chains = n;
  cfg.mh_steps = m;
  cfg.quantile = rho;
  cfg.seed = seed;
  return cfg;
}

void expect_trace_invariants(const AmlsResult& r, const PropertySpec& spec,
                             const InputModel& model) {
  double running = 0.0;
  for (std::size_t k = 0; k < r.level_log_factors.size(); ++k) {
    EXPECT_LE(r.level_log_factors[k], 0.0);
    running += r.level_log_factors[k];
    if (k > 0) EXPECT_GT(r.levels[k], r.levels[k - 1]);
  }
  if (r.unsat) {
    EXPECT_EQ(r.log_estimate, kNegInf);
    EXPECT_TRUE(r.counterexamples.empty());
    return;
  }
  EXPECT_DOUBLE_EQ(r.log_estimate, running);
  EXPECT_EQ(r.levels.back(), 0.0);
  for (std::size_t i = 0; i < r.counterexamples.rows(); ++i) {
    EXPECT_GE(r.counterexample_values[i], 0.0);
    EXPECT_EQ(spec.evaluate(r.counterexamples.row(i)), r.counterexample_values[i]);
    EXPECT_TRUE(model.in_support(r.counterexamples.row(i)));
  }
}

TEST(AmlsRunTest, CommonEventSingleLevel) {
  const auto model = unit_box(1);
  const auto spec = PropertySpec::linear_threshold({1.0}, 0.5);
  const auto r = amls_run(model, spec, small_config(10'000, 10, 0.1, 1));
  EXPECT_FALSE(r.unsat);
  EXPECT_NEAR(r.log_estimate, std::log(0.5), 0.05);
  EXPECT_EQ(r.n_levels(), 1u);
  EXPECT_EQ(r.counterexamples.rows(), 10'000u);
  expect_trace_invariants(r, spec, model);
}

TEST(AmlsRunTest, ImpossibleEventReturnsSentinel) {
  const auto problem = impossible_event();
  AmlsConfig cfg = small_config(1000, 20, 0.1, 2);
  cfg.log_p_min = std::log(1e-30);
  const auto r = amls_run(problem.model, problem.spec, cfg);
  EXPECT_TRUE(r.unsat);
  EXPECT_TRUE(r.counterexamples.empty());
  EXPECT_LE(r.n_levels(), 31u);
  expect_trace_invariants(r, problem.spec, problem.model);
}

TEST(AmlsRunTest, QuantileFactorsAreExactOnContinuousProblems) {
  const auto problem = oracle_by_name("irwin-hall-5-4");
  const auto r = amls_run(problem.model, problem.spec, small_config(1000, 30, 0.1, 3));
  ASSERT_FALSE(r.unsat);
  ASSERT_GE(r.n_levels(), 2u);
  for (std::size_t k = 0; k + 1 < r.n_levels(); ++k) {
    EXPECT_EQ(r.survivor_counts[k], 100u);
    EXPECT_EQ(r.level_log_factors[k], std::log(0.1));
  }
  const double last = std::exp(r.level_log_factors.back());
  EXPECT_GT(last, 0.0);
  EXPECT_LE(last, 1.0);
  expect_trace_invariants(r, problem.spec, problem.model);
}

TEST(AmlsRunTest, GaussianModelUsesDensityRatio) {
  const auto problem = oracle_by_name("gaussian-halfspace-3-4-5");
  const auto r = amls_run(problem.model, problem.spec, small_config(4000, 50, 0.1, 4));
  ASSERT_FALSE(r.unsat);
  EXPECT_NEAR(r.log10_estimate(), problem.log_true_prob / std::log(10.0), 0.1);
  expect_trace_invariants(r, problem.spec, problem.model);
}

TEST(AmlsRunTest, SameSeedIsBitIdentical) {
  const auto problem = oracle_by_name("irwin-hall-5-4");
  const auto cfg = small_config(500, 20, 0.25, 9);
  EXPECT_EQ(amls_run(problem.model, problem.spec, cfg), amls_run(problem.model, problem.spec, cfg));
  auto other = cfg;
  other.seed = 10;
  EXPECT_NE(amls_run(problem.model, problem.spec, cfg).counterexamples,
            amls_run(problem.model, problem.spec, other).counterexamples);
}

TEST(AmlsRunTest, MaxLevelsExhaustedCarriesPartialTrace) {
  const auto problem = oracle_by_name("irwin-hall-10-9.5");
  AmlsConfig cfg = small_config(500, 10, 0.1, 5);
  cfg.max_levels = 2;
  try {
    amls_run(problem.model, problem.spec, cfg);
    FAIL() << "expected DivergedRunError";
  } catch (const DivergedRunError& e) {
    EXPECT_EQ(e.partial().n_levels(), 2u);
    EXPECT_EQ(e.partial().level_log_factors.size(), 2u);
  }
}

TEST(AmlsRunTest, TiedValuesStallAndDiverge) {
  // s == -0.5 everywhere: every level sits at -0.5 and never reaches 0.
  const auto model = unit_box(2);
  const auto spec = PropertySpec::linear_threshold({0.0, 0.0}, 0.5);
  EXPECT_THROW(amls_run(model, spec, small_config(100, 2, 0.1, 6)), DivergedRunError);
}

TEST(AmlsRunTest, InvalidConfigsAreRejected) {
  const auto model = unit_box(1);
  const auto spec = PropertySpec::linear_threshold({1.0}, 0.5);
  EXPECT_THROW(amls_run(model, spec, small_config(5, 10, 0.1, 0)), ConfigError);
  EXPECT_THROW(amls_run(model, spec, small_config(100, 10, 1.0, 0)), ConfigError);
  EXPECT_THROW(amls_run(model, spec, small_config(100, 0, 0.1, 0)), ConfigError);
  EXPECT_THROW(amls_run(unit_box(2), spec, small_config(100, 10, 0.1, 0)), ConfigError);
  AmlsConfig cfg = small_config(100, 10, 0.1, 0);
  cfg.log_p_min = 0.0;
  EXPECT_THROW(amls_run(model, spec, cfg), ConfigError);
}

TEST(AmlsConfigTest, Defaults) {
  AmlsConfig cfg;
  cfg.quantile = 0.1;
  cfg.log_p_min = std::log(1e-30);
  // 2 * ceil(69.08 / 2.303) + 10
  EXPECT_EQ(cfg.resolved_max_levels(), 2u * 30u + 10u);
  EXPECT_DOUBLE_EQ(cfg.resolved_width(InputModel::uniform_box({0, 0}, {1, 2})), 0.25);
  cfg.proposal_width_init = 0.7;
  EXPECT_EQ(cfg.resolved_width(unit_box(1)), 0.7);
}

}  // namespace
}  // namespace amls
