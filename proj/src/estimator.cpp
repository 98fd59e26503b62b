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

#include <algorithm>
#include <cfloat>
#include <functional>
#include <limits>
#include <numeric>

#include "amls/kernels.hpp"

namespace amls {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::size_t raw_quantile_index(double rho, std::size_t n) {
  // Absorb the rounding of rho * n so that e.g. 0.29 * 100 gives 29.
  return static_cast<std::size_t>(
      std::floor(rho * static_cast<double>(n) * (1.0 + 4.0 * DBL_EPSILON)));
}

AmlsResult unsat_result(AmlsResult r) {
  r.unsat = true;
  r.log_estimate = kNegInf;
  r.counterexamples = Matrix();
  r.counterexample_values.clear();
  return r;
}

}  // namespace

void AmlsConfig::validate() const {
  if (n_chains == 0) throw ConfigError("n_chains must be at least 1");
  if (mh_steps == 0) throw ConfigError("mh_steps must be at least 1");
  if (!(quantile > 0.0 && quantile < 1.0)) {
    throw ConfigError("quantile must lie in (0, 1)");
  }
  if (raw_quantile_index(quantile, n_chains) < 1) {
    throw ConfigError("quantile * n_chains must be at least 1");
  }
  if (!(log_p_min < 0.0) || !std::isfinite(log_p_min)) {
    throw ConfigError("log_p_min must be negative and finite");
  }
  if (proposal_width_init && !(*proposal_width_init > 0.0 &&
                               std::isfinite(*proposal_width_init))) {
    throw ConfigError("proposal_width_init must be positive");
  }
  if (!(accept_target > 0.0 && accept_target < 1.0)) {
    throw ConfigError("accept_target must lie in (0, 1)");
  }
  if (!(width_shrink > 0.0 && width_shrink < 1.0)) {
    throw ConfigError("width_shrink must lie in (0, 1)");
  }
  if (!(width_grow >= 1.0) || !std::isfinite(width_grow)) {
    throw ConfigError("width_grow must be at least 1");
  }
  if (max_levels && *max_levels == 0) throw ConfigError("max_levels must be at least 1");
}

std::size_t AmlsConfig::resolved_max_levels() const {
  if (max_levels) return *max_levels;
  const double per_level = -std::log(quantile);
  // The relative slack keeps exact ratios such as ln(1e-30) / ln(0.1) at 30.
  const double ratio = std::abs(log_p_min) / per_level;
  return 2 * static_cast<std::size_t>(std::ceil(ratio * (1.0 - 1e-12))) + 10;
}

double AmlsConfig::resolved_width(const InputModel& model) const {
  return proposal_width_init ? *proposal_width_init : 0.25 * model.smallest_side();
}

std::size_t quantile_index(double rho, std::size_t n) {
  return std::clamp<std::size_t>(raw_quantile_index(rho, n), 1, std::max<std::size_t>(n, 1));
}

double update_level(std::span<const double> sorted_desc, double rho) {
  if (sorted_desc.empty()) throw UsageError("update_level: no values");
  const std::size_t q = quantile_index(rho, sorted_desc.size());
  return std::min(0.0, sorted_desc[q - 1]);
}

ChainPopulation resample_survivors(const ChainPopulation& pop, double level,
                                   Engine& rng) {
  std::vector<std::size_t> survivors;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    if (pop.values[i] >= level) survivors.push_back(i);
  }
  if (survivors.empty()) throw UsageError("resample_survivors: no survivor");

  const std::size_t n = pop.size();
  ChainPopulation out;
  out.positions = Matrix(n, pop.dimension());
  out.values.resize(n);
  out.widths.resize(n);
  out.acceptance.assign(n, 0.0);
  std::uniform_int_distribution<std::size_t> pick(0, survivors.size() - 1);
  for (std::size_t i = 0; i < n; ++i) {
    const std::size_t parent = survivors[pick(rng)];
    std::ranges::copy(pop.positions.row(parent), out.positions.row(i).begin());
    out.values[i] = pop.values[parent];
    out.widths[i] = pop.widths[parent];
  }
  return out;
}

void adapt_proposal(ChainPopulation& pop, const AmlsConfig& cfg) {
  for (std::size_t i = 0; i < pop.widths.size(); ++i) {
    if (pop.acceptance[i] < cfg.accept_target) {
      pop.widths[i] *= cfg.width_shrink;
    } else if (pop.acceptance[i] > cfg.accept_target) {
      pop.widths[i] *= cfg.width_grow;
    }
    pop.acceptance[i] = 0.0;
  }
}

std::uint64_t mh_sweep(ChainPopulation& pop, double level, const InputModel& model,
                       const PropertySpec& spec, std::uint32_t steps,
                       std::uint64_t stream_seed) {
  return kernels::omp::mh_sweep(pop, model, spec, {level, steps, stream_seed});
}

AmlsResult amls_run(const InputModel& model, const PropertySpec& spec,
                    const AmlsConfig& cfg) {
  cfg.validate();
  if (model.dimension() != spec.dimension()) {
    throw ConfigError("input model dimension " + std::to_string(model.dimension()) +
                      " differs from property dimension " +
                      std::to_string(spec.dimension()));
  }
  const std::size_t n = cfg.n_chains;
  const std::size_t max_levels = cfg.resolved_max_levels();

  ChainPopulation pop;
  {
    Engine prior = make_stream(cfg.seed, StreamTag::kPrior);
    pop.positions = model.sample_prior(n, prior);
  }
  pop.values = spec.evaluate(pop.positions);
  pop.widths.assign(n, cfg.resolved_width(model));
  pop.acceptance.assign(n, 0.0);

  AmlsResult result;
  result.property_evaluations = n;
  double level = kNegInf;
  double log_estimate = 0.0;
  std::vector<double> sorted(n);
  std::size_t k = 0;

  while (level < 0.0) {
    ++k;
    if (k > max_levels) {
      result.log_estimate = log_estimate;
      throw DivergedRunError("no progress to level 0 after " +
                                 std::to_string(max_levels) + " levels",
                             std::move(result));
    }
    std::ranges::copy(pop.values, sorted.begin());
    std::ranges::sort(sorted, std::greater<>());
    level = update_level(sorted, cfg.quantile);

    const auto survivors = static_cast<std::size_t>(
        std::ranges::count_if(pop.values, [&](double v) { return v >= level; }));
    result.levels.push_back(level);
    result.survivor_counts.push_back(survivors);
    if (survivors == 0) return unsat_result(std::move(result));

    const double log_factor =
        std::log(static_cast<double>(survivors) / static_cast<double>(n));
    result.level_log_factors.push_back(log_factor);
    log_estimate += log_factor;
    if (log_estimate < cfg.log_p_min) return unsat_result(std::move(result));

    Engine resample = make_stream(cfg.seed, StreamTag::kResample, k);
    pop = resample_survivors(pop, level, resample);
    result.property_evaluations +=
        mh_sweep(pop, level, model, spec, cfg.mh_steps,
                 derive_seed(cfg.seed, StreamTag::kSweep, k));
    result.acceptance_trace.push_back(
        std::accumulate(pop.acceptance.begin(), pop.acceptance.end(), 0.0) /
        static_cast<double>(n));
    if (cfg.adapt_proposal) adapt_proposal(pop, cfg);
  }

  result.log_estimate = log_estimate;
  result.counterexamples = std::move(pop.positions);
  result.counterexample_values = std::move(pop.values);
  return result;
}

NaiveMcResult naive_mc(const InputModel& model, const PropertySpec& spec,
                       std::uint64_t n_samples, std::uint64_t batch_size,
                       std::uint64_t seed) {
  if (n_samples == 0) throw ConfigError("naive MC: n_samples must be at least 1");
  if (model.dimension() != spec.dimension()) {
    throw ConfigError("input model dimension differs from property dimension");
  }
  const auto counts = kernels::omp::count_hits(model, spec, n_samples, batch_size, seed);
  NaiveMcResult r;
  r.hits = counts.hits;
  r.samples = counts.samples;
  r.unsat = counts.hits == 0;
  r.log_estimate = r.unsat ? kNegInf : std::log(r.estimate());
  return r;
}

}  // namespace amls
