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

// Reference implementations. Kept deliberately plain; the OpenMP variants are
// tested for bit-equality against these.

#include <algorithm>

#include "amls/errors.hpp"
#include "amls/network.hpp"
#include "chain_step.hpp"

namespace amls::kernels::serial {

Matrix forward_batch(const Network& net, const Matrix& batch) {
  if (batch.cols() != net.input_dim()) {
    throw UsageError("forward: batch width " + std::to_string(batch.cols()) +
                     " differs from network input_dim " +
                     std::to_string(net.input_dim()));
  }
  Matrix out(batch.rows(), net.output_dim());
  ForwardScratch scratch;
  for (std::size_t i = 0; i < batch.rows(); ++i) {
    net.forward_row(batch.row(i), out.row(i), scratch);
  }
  return out;
}

std::vector<double> evaluate_batch(const PropertySpec& spec, const Matrix& batch) {
  if (batch.cols() != spec.dimension()) {
    throw UsageError("property: batch width " + std::to_string(batch.cols()) +
                     " differs from property dimension " +
                     std::to_string(spec.dimension()));
  }
  std::vector<double> out(batch.rows());
  for (std::size_t i = 0; i < batch.rows(); ++i) out[i] = spec.evaluate(batch.row(i));
  return out;
}

std::uint64_t mh_sweep(ChainPopulation& pop, const InputModel& model,
                       const PropertySpec& spec, const SweepRequest& req) {
  std::vector<double> proposal;
  std::uint64_t evaluations = 0;
  for (std::size_t i = 0; i < pop.size(); ++i) {
    evaluations += detail::advance_chain(pop, i, model, spec, req, proposal);
  }
  return evaluations;
}

HitCount count_hits(const InputModel& model, const PropertySpec& spec,
                    std::uint64_t n_samples, std::uint64_t batch_size,
                    std::uint64_t seed) {
  if (batch_size == 0) throw ConfigError("naive MC: batch_size must be positive");
  const std::uint64_t n_batches = (n_samples + batch_size - 1) / batch_size;
  std::vector<double> point;
  HitCount out;
  out.samples = n_samples;
  for (std::uint64_t b = 0; b < n_batches; ++b) {
    const std::uint64_t count = std::min(batch_size, n_samples - b * batch_size);
    out.hits += detail::batch_hits(model, spec, b, count, seed, point);
  }
  return out;
}

}  // namespace amls::kernels::serial
