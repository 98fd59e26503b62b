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

// Per-unit work shared by the serial and OpenMP kernels.

#ifndef AMLS_SRC_KERNELS_CHAIN_STEP_HPP
#define AMLS_SRC_KERNELS_CHAIN_STEP_HPP

#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <random>
#include <vector>

#include "amls/chains.hpp"
#include "amls/input_model.hpp"
#include "amls/kernels.hpp"
#include "amls/property.hpp"
#include "amls/random.hpp"

namespace amls::kernels::detail {

/// Advances chain i by req.steps transitions. Returns property evaluations.
inline std::uint64_t advance_chain(ChainPopulation& pop, std::size_t i,
                                   const InputModel& model,
                                   const PropertySpec& spec,
                                   const SweepRequest& req,
                                   std::vector<double>& proposal) {
  Engine rng = make_stream(req.stream_seed, StreamTag::kSweep, i);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t d = pop.dimension();
  const double width = pop.widths[i];
  std::span<double> x = pop.positions.row(i);
  double value = pop.values[i];
  proposal.resize(d);

  std::uint64_t evaluations = 0;
  std::uint32_t accepted = 0;
  for (std::uint32_t step = 0; step < req.steps; ++step) {
    for (std::size_t j = 0; j < d; ++j) {
      proposal[j] = x[j] + width * (2.0 * unit(rng) - 1.0);
    }
    const double log_ratio = model.log_density_ratio(proposal, x);
    if (log_ratio == -INFINITY) continue;
    if (log_ratio < 0.0 && !(std::log(unit(rng)) < log_ratio)) continue;
    const double candidate = spec.evaluate(proposal);
    ++evaluations;
    if (candidate >= req.level) {
      std::copy(proposal.begin(), proposal.end(), x.begin());
      value = candidate;
      ++accepted;
    }
  }
  pop.values[i] = value;
  pop.acceptance[i] =
      req.steps == 0 ? 0.0 : static_cast<double>(accepted) / req.steps;
  return evaluations;
}

/// Hits in batch b of a naive Monte Carlo run.
inline std::uint64_t batch_hits(const InputModel& model, const PropertySpec& spec,
                                std::uint64_t batch, std::uint64_t count,
                                std::uint64_t seed, std::vector<double>& point) {
  Engine rng = make_stream(seed, StreamTag::kNaiveMc, batch);
  point.resize(model.dimension());
  std::uint64_t hits = 0;
  for (std::uint64_t k = 0; k < count; ++k) {
    model.sample(point, rng);
    if (spec.evaluate(point) >= 0.0) ++hits;
  }
  return hits;
}

/// First exception thrown inside a parallel region, rethrown after it.
class ExceptionSlot {
 public:
  template <class F>
  void run(F&& f) noexcept {
    try {
      f();
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu_);
      if (!error_) error_ = std::current_exception();
    }
  }
  void rethrow() const {
    if (error_) std::rethrow_exception(error_);
  }

 private:
  std::mutex mu_;
  std::exception_ptr error_;
};

}  // namespace amls::kernels::detail

#endif  // AMLS_SRC_KERNELS_CHAIN_STEP_HPP
