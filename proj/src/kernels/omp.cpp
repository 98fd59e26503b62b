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

#include <algorithm>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "amls/errors.hpp"
#include "amls/network.hpp"
#include "chain_step.hpp"

namespace amls::kernels {

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

namespace omp {

Matrix forward_batch(const Network& net, const Matrix& batch) {
  if (batch.cols() != net.input_dim()) {
    throw UsageError("forward: batch width " + std::to_string(batch.cols()) +
                     " differs from network input_dim " +
                     std::to_string(net.input_dim()));
  }
  Matrix out(batch.rows(), net.output_dim());
  const auto n = static_cast<std::int64_t>(batch.rows());
  detail::ExceptionSlot slot;
#pragma omp parallel
  {
    ForwardScratch scratch;
#pragma omp for schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
      slot.run([&] { net.forward_row(batch.row(i), out.row(i), scratch); });
    }
  }
  slot.rethrow();
  return out;
}

std::vector<double> evaluate_batch(const PropertySpec& spec, const Matrix& batch) {
  if (batch.cols() != spec.dimension()) {
    throw UsageError("property: batch width " + std::to_string(batch.cols()) +
                     " differs from property dimension " +
                     std::to_string(spec.dimension()));
  }
  std::vector<double> out(batch.rows());
  const auto n = static_cast<std::int64_t>(batch.rows());
  detail::ExceptionSlot slot;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    slot.run([&] { out[i] = spec.evaluate(batch.row(i)); });
  }
  slot.rethrow();
  return out;
}

std::uint64_t mh_sweep(ChainPopulation& pop, const InputModel& model,
                       const PropertySpec& spec, const SweepRequest& req) {
  const auto n = static_cast<std::int64_t>(pop.size());
  std::uint64_t evaluations = 0;
  detail::ExceptionSlot slot;
#pragma omp parallel reduction(+ : evaluations)
  {
    std::vector<double> proposal;
#pragma omp for schedule(dynamic, 64)
    for (std::int64_t i = 0; i < n; ++i) {
      slot.run([&] {
        evaluations += detail::advance_chain(pop, static_cast<std::size_t>(i),
                                             model, spec, req, proposal);
      });
    }
  }
  slot.rethrow();
  return evaluations;
}

HitCount count_hits(const InputModel& model, const PropertySpec& spec,
                    std::uint64_t n_samples, std::uint64_t batch_size,
                    std::uint64_t seed) {
  if (batch_size == 0) throw ConfigError("naive MC: batch_size must be positive");
  const auto n_batches =
      static_cast<std::int64_t>((n_samples + batch_size - 1) / batch_size);
  std::uint64_t hits = 0;
  detail::ExceptionSlot slot;
#pragma omp parallel reduction(+ : hits)
  {
    std::vector<double> point;
#pragma omp for schedule(dynamic, 1)
    for (std::int64_t b = 0; b < n_batches; ++b) {
      slot.run([&] {
        const auto ub = static_cast<std::uint64_t>(b);
        const std::uint64_t count = std::min(batch_size, n_samples - ub * batch_size);
        hits += detail::batch_hits(model, spec, ub, count, seed, point);
      });
    }
  }
  slot.rethrow();
  return {hits, n_samples};
}

}  // namespace omp
}  // namespace amls::kernels
