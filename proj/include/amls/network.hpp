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

#ifndef AMLS_NETWORK_HPP
#define AMLS_NETWORK_HPP

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <json.hpp>

#include "amls/matrix.hpp"

namespace amls {

enum class LayerKind { kDense, kRelu };

/// Dense layers hold a row-major out x in weight matrix. Relu layers carry no
/// parameters; their width is in == out.
struct Layer {
  LayerKind kind = LayerKind::kDense;
  std::size_t in = 0;
  std::size_t out = 0;
  std::vector<double> weights;
  std::vector<double> bias;

  static Layer dense(std::size_t in, std::size_t out,
                     std::vector<double> weights, std::vector<double> bias);
  static Layer relu(std::size_t width);

  bool operator==(const Layer&) const = default;
};

/// Per-thread buffers for single-row inference.
struct ForwardScratch {
  std::vector<double> a;
  std::vector<double> b;
};

/// Feed-forward dense/ReLU network computing logits z(x). Immutable; safe to
/// share across threads.
class Network {
 public:
  /// Validates the dimension chain and finiteness of all parameters. Throws
  /// LoadError naming the offending layer.
  Network(std::size_t input_dim, std::vector<Layer> layers);

  std::size_t input_dim() const { return input_dim_; }
  std::size_t output_dim() const { return output_dim_; }
  const std::vector<Layer>& layers() const { return layers_; }

  /// Logits of one input written into `out` (size output_dim). Throws
  /// NumericError with the layer index if a layer produces a non-finite
  /// value.
  void forward_row(std::span<const double> x, std::span<double> out,
                   ForwardScratch& scratch) const;

  /// Batched logits, one row per input row. Parallel over rows.
  Matrix forward(const Matrix& batch) const;

  bool operator==(const Network&) const = default;

 private:
  std::size_t input_dim_;
  std::size_t output_dim_;
  std::vector<Layer> layers_;
};

nlohmann::json network_to_json(const Network& net);
Network network_from_json(const nlohmann::json& doc);

Network load_network(const std::filesystem::path& path);
void save_network(const Network& net, const std::filesystem::path& path);

/// Seeded dense-ReLU network with the given layer widths (input first),
/// He-style normal weights and small normal biases. A ReLU follows every
/// dense layer except the last.
Network random_dense_relu(std::span<const std::size_t> widths,
                          std::uint64_t seed);

}  // namespace amls

#endif  // AMLS_NETWORK_HPP
