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

#ifndef AMLS_ESTIMATOR_HPP
#define AMLS_ESTIMATOR_HPP

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "amls/chains.hpp"
#include "amls/errors.hpp"
#include "amls/input_model.hpp"
#include "amls/matrix.hpp"
#include "amls/property.hpp"
#include "amls/random.hpp"

namespace amls {

/// Parameters of one adaptive multi-level splitting run. All logarithms are
/// natural.
struct AmlsConfig {
  std::size_t n_chains = 10000;
  std::uint32_t mh_steps = 100;
  double quantile = 0.1;
  double log_p_min = -69.07755278982137;  // ln(1e-30)
  /// Initial per-chain proposal radius. Unset: a quarter of the shortest
  /// support side of the input model.
  std::optional<double> proposal_width_init;
  double accept_target = 0.234;
  double width_shrink = 0.5;
  double width_grow = 1.02;
  /// Unset: 2 * ceil(|log_p_min| / -log(quantile)) + 10.
  std::optional<std::size_t> max_levels;
  bool adapt_proposal = true;
  std::uint64_t seed = 0;

  /// Throws ConfigError naming the first invalid field.
  void validate() const;
  std::size_t resolved_max_levels() const;
  double resolved_width(const InputModel& model) const;
};

/// Outcome of amls_run. `unsat` is the sentinel for "estimate below P_min";
/// log_estimate is then -inf and counterexamples is empty.
struct AmlsResult {
  bool unsat = false;
  double log_estimate = 0.0;
  std::vector<double> levels;
  /// log of the per-level survivor fraction.
  std::vector<double> level_log_factors;
  std::vector<std::size_t> survivor_counts;
  /// Mean acceptance fraction of the sweep run at each level.
  std::vector<double> acceptance_trace;
  Matrix counterexamples;
  std::vector<double> counterexample_values;
  std::uint64_t property_evaluations = 0;

  std::size_t n_levels() const { return levels.size(); }
  double log10_estimate() const { return log_estimate / std::log(10.0); }

  bool operator==(const AmlsResult&) const = default;
};

/// The run used up max_levels without reaching level 0 or crossing P_min.
/// Carries the partial trace.
class DivergedRunError : public Error {
 public:
  DivergedRunError(const std::string& what, AmlsResult partial)
      : Error(what), partial_(std::move(partial)) {}
  const AmlsResult& partial() const { return partial_; }

 private:
  AmlsResult partial_;
};

/// 1-based quantile index floor(rho * n), clamped to [1, n].
std::size_t quantile_index(double rho, std::size_t n);

/// min{0, value at 1-based index floor(rho * N)} of descending-sorted values.
double update_level(std::span<const double> sorted_desc, double rho);

/// N chains drawn uniformly with replacement from those with value >= level.
/// Each copy inherits its parent's width. Throws UsageError with no survivor.
ChainPopulation resample_survivors(const ChainPopulation& pop, double level,
                                   Engine& rng);

/// Halve widths whose sweep acceptance is below target, grow those above,
/// then reset the acceptance accumulators.
void adapt_proposal(ChainPopulation& pop, const AmlsConfig& cfg);

/// M Metropolis-Hastings transitions per chain at `level` (OpenMP kernel).
/// Returns the number of property evaluations.
std::uint64_t mh_sweep(ChainPopulation& pop, double level, const InputModel& model,
                       const PropertySpec& spec, std::uint32_t steps,
                       std::uint64_t stream_seed);

/// Adaptive multi-level splitting with termination threshold.
///
/// Throws ConfigError for invalid configs or mismatched dimensions and
/// DivergedRunError when max_levels is exhausted.
AmlsResult amls_run(const InputModel& model, const PropertySpec& spec,
                    const AmlsConfig& cfg);

struct NaiveMcResult {
  bool unsat = false;  // no hit observed
  double log_estimate = 0.0;
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;

  double estimate() const {
    return static_cast<double>(hits) / static_cast<double>(samples);
  }
};

/// Plain Monte Carlo: hits / n_samples, processed in batches of at most
/// batch_size, batch b drawing from substream (seed, b).
NaiveMcResult naive_mc(const InputModel& model, const PropertySpec& spec,
                       std::uint64_t n_samples, std::uint64_t batch_size,
                       std::uint64_t seed);

}  // namespace amls

#endif  // AMLS_ESTIMATOR_HPP
