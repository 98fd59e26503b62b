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

#include "amls/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <string>

#include "amls/errors.hpp"
#include "amls/kernels.hpp"
#include "amls/random.hpp"

namespace amls {

namespace {

constexpr int kWeightFormatVersion = 1;

std::string layer_tag(std::size_t index) {
  return "layer " + std::to_string(index);
}

}  // namespace

Layer Layer::dense(std::size_t in, std::size_t out, std::vector<double> weights,
                   std::vector<double> bias) {
  Layer l;
  l.kind = LayerKind::kDense;
  l.in = in;
  l.out = out;
  l.weights = std::move(weights);
  l.bias = std::move(bias);
  return l;
}

Layer Layer::relu(std::size_t width) {
  Layer l;
  l.kind = LayerKind::kRelu;
  l.in = width;
  l.out = width;
  return l;
}

Network::Network(std::size_t input_dim, std::vector<Layer> layers)
    : input_dim_(input_dim), output_dim_(input_dim), layers_(std::move(layers)) {
  if (input_dim_ == 0) throw LoadError("network input_dim must be positive");
  if (layers_.empty()) throw LoadError("network has no layers");
  std::size_t width = input_dim_;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const Layer& l = layers_[i];
    if (l.in != width) {
      throw LoadError(layer_tag(i) + ": expects input width " +
                      std::to_string(l.in) + " but previous width is " +
                      std::to_string(width));
    }
    if (l.kind == LayerKind::kRelu) {
      if (l.out != l.in || !l.weights.empty() || !l.bias.empty()) {
        throw LoadError(layer_tag(i) + ": relu layer carries parameters");
      }
    } else {
      if (l.out == 0) throw LoadError(layer_tag(i) + ": dense width is 0");
      if (l.weights.size() != l.in * l.out) {
        throw LoadError(layer_tag(i) + ": weights has " +
                        std::to_string(l.weights.size()) + " entries, expected " +
                        std::to_string(l.in * l.out));
      }
      if (l.bias.size() != l.out) {
        throw LoadError(layer_tag(i) + ": bias has " +
                        std::to_string(l.bias.size()) + " entries, expected " +
                        std::to_string(l.out));
      }
      auto finite = [](double v) { return std::isfinite(v); };
      if (!std::all_of(l.weights.begin(), l.weights.end(), finite) ||
          !std::all_of(l.bias.begin(), l.bias.end(), finite)) {
        throw LoadError(layer_tag(i) + ": non-finite parameter");
      }
    }
    width = l.out;
  }
  output_dim_ = width;
}

void Network::forward_row(std::span<const double> x, std::span<double> out,
                          ForwardScratch& scratch) const {
  if (x.size() != input_dim_) {
    throw UsageError("forward: input has width " + std::to_string(x.size()) +
                     ", network expects " + std::to_string(input_dim_));
  }
  std::vector<double>& cur = scratch.a;
  std::vector<double>& next = scratch.b;
  cur.assign(x.begin(), x.end());
  for (std::size_t li = 0; li < layers_.size(); ++li) {
    const Layer& l = layers_[li];
    if (l.kind == LayerKind::kRelu) {
      for (double& v : cur) v = v > 0.0 ? v : 0.0;
      continue;
    }
    next.resize(l.out);
    const double* w = l.weights.data();
    for (std::size_t o = 0; o < l.out; ++o) {
      const double* wr = w + o * l.in;
      double acc = l.bias[o];
      for (std::size_t j = 0; j < l.in; ++j) acc += wr[j] * cur[j];
      if (!std::isfinite(acc)) {
        throw NumericError(layer_tag(li) + ": non-finite activation");
      }
      next[o] = acc;
    }
    std::swap(cur, next);
  }
  std::copy(cur.begin(), cur.end(), out.begin());
}

Matrix Network::forward(const Matrix& batch) const {
  return kernels::omp::forward_batch(*this, batch);
}

nlohmann::json network_to_json(const Network& net) {
  nlohmann::json layers = nlohmann::json::array();
  for (const Layer& l : net.layers()) {
    if (l.kind == LayerKind::kRelu) {
      layers.push_back({{"kind", "relu"}});
    } else {
      layers.push_back({{"kind", "dense"},
                        {"out", l.out},
                        {"in", l.in},
                        {"weights", l.weights},
                        {"bias", l.bias}});
    }
  }
  return {{"format_version", kWeightFormatVersion},
          {"input_dim", net.input_dim()},
          {"layers", std::move(layers)}};
}

Network network_from_json(const nlohmann::json& doc) {
  try {
    if (!doc.is_object()) throw LoadError("weight file is not a JSON object");
    if (!doc.contains("format_version") ||
        doc.at("format_version").get<int>() != kWeightFormatVersion) {
      throw LoadError("weight file: format_version must be 1");
    }
    const auto input_dim = doc.at("input_dim").get<std::size_t>();
    const auto& jl = doc.at("layers");
    if (!jl.is_array()) throw LoadError("weight file: layers is not an array");
    std::vector<Layer> layers;
    std::size_t width = input_dim;
    for (std::size_t i = 0; i < jl.size(); ++i) {
      const auto& obj = jl[i];
      const auto kind = obj.at("kind").get<std::string>();
      try {
        if (kind == "relu") {
          layers.push_back(Layer::relu(width));
        } else if (kind == "dense") {
          layers.push_back(Layer::dense(
              obj.at("in").get<std::size_t>(), obj.at("out").get<std::size_t>(),
              obj.at("weights").get<std::vector<double>>(),
              obj.at("bias").get<std::vector<double>>()));
          width = layers.back().out;
        } else {
          throw LoadError(layer_tag(i) + ": unknown kind '" + kind + "'");
        }
      } catch (const nlohmann::json::exception& e) {
        throw LoadError(layer_tag(i) + ": " + e.what());
      }
    }
    return Network(input_dim, std::move(layers));
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("weight file: ") + e.what());
  }
}

Network load_network(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open weight file " + path.string());
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(path.string() + ": " + e.what());
  }
  return network_from_json(doc);
}

void save_network(const Network& net, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write weight file " + path.string());
  out << network_to_json(net).dump() << '\n';
}

Network random_dense_relu(std::span<const std::size_t> widths,
                          std::uint64_t seed) {
  if (widths.size() < 2) {
    throw ConfigError("random_dense_relu needs at least input and output widths");
  }
  Engine rng = make_stream(seed, StreamTag::kNetworkInit);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<Layer> layers;
  for (std::size_t i = 0; i + 1 < widths.size(); ++i) {
    const std::size_t in = widths[i], out = widths[i + 1];
    const double scale = std::sqrt(2.0 / static_cast<double>(in));
    std::vector<double> w(in * out), b(out);
    for (double& v : w) v = scale * normal(rng);
    for (double& v : b) v = 0.1 * normal(rng);
    layers.push_back(Layer::dense(in, out, std::move(w), std::move(b)));
    if (i + 2 < widths.size()) layers.push_back(Layer::relu(out));
  }
  return Network(widths.front(), std::move(layers));
}

}  // namespace amls
