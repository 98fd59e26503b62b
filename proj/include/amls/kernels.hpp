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

#ifndef AMLS_KERNELS_HPP
#define AMLS_KERNELS_HPP

// Data-parallel inner loops of the estimators.
//
// Every kernel exists twice: `serial` is the plain reference loop and `omp`
// distributes rows, chains or batches over OpenMP threads. Each unit of work
// draws from its own seed-derived substream, so both variants return
// bit-identical results for the same inputs regardless of thread count.

#include <cstdint>
#include <vector>

#include "amls/chains.hpp"
#include "amls/input_model.hpp"
#include "amls/matrix.hpp"

namespace amls {

class Network;
class PropertySpec;

namespace kernels {

/// Hit count of a naive Monte Carlo run.
struct HitCount {
  std::uint64_t hits = 0;
  std::uint64_t samples = 0;
};

/// One Metropolis-Hastings sweep: `steps` transitions per chain targeting
/// p(x) 1{s(x) >= level}. Proposals are x + U[-w, w]^d with the chain's own
/// width w; out-of-support proposals are rejected whole. Chain i draws from
/// substream (stream_seed, i). Returns the number of property evaluations.
struct SweepRequest {
  double level;
  std::uint32_t steps;
  std::uint64_t stream_seed;
};

namespace serial {

Matrix forward_batch(const Network& net, const Matrix& batch);
std::vector<double> evaluate_batch(const PropertySpec& spec, const Matrix& batch);
std::uint64_t mh_sweep(ChainPopulation& pop, const InputModel& model,
                       const PropertySpec& spec, const SweepRequest& req);
/// Batch b samples from substream (seed, b).
HitCount count_hits(const InputModel& model, const PropertySpec& spec,
                    std::uint64_t n_samples, std::uint64_t batch_size,
                    std::uint64_t seed);

}  // namespace serial

namespace omp {

Matrix forward_batch(const Network& net, const Matrix& batch);
std::vector<double> evaluate_batch(const PropertySpec& spec, const Matrix& batch);
std::uint64_t mh_sweep(ChainPopulation& pop, const InputModel& model,
                       const PropertySpec& spec, const SweepRequest& req);
HitCount count_hits(const InputModel& model, const PropertySpec& spec,
                    std::uint64_t n_samples, std::uint64_t batch_size,
                    std::uint64_t seed);

}  // namespace omp

/// Number of OpenMP threads the omp kernels will use (1 without OpenMP).
int max_threads();

}  // namespace kernels
}  // namespace amls

#endif  // AMLS_KERNELS_HPP
