// Copyright 2026 The pvqnet Authors
// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Layer graph for feed-forward and convolutional classifiers.
//
// Weight layouts (row-major):
//   fully connected  {units, in_features}
//   conv2d           {filters, in_channels, kernel_h, kernel_w}
// Feature maps are {channels, height, width}.

#ifndef PVQNET_NETWORK_HPP_
#define PVQNET_NETWORK_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "pvqnet/pvq.hpp"
#include "pvqnet/tensor.hpp"

namespace pvqnet {

enum class LayerKind { kInput, kFullyConnected, kConv2d, kMaxPool, kDropout };
enum class Activation { kNone, kRelu, kBsign };

std::string_view to_string(LayerKind kind);
std::string_view to_string(Activation act);
std::optional<LayerKind> parse_layer_kind(std::string_view s);
std::optional<Activation> parse_activation(std::string_view s);

struct FloatParams {
  RealTensor weights;
  std::vector<double> biases;
};

// A layer's weights and biases encoded jointly as one point of P(N, k),
// split back into the original shapes. The represented real parameters are
//   weights = rho * w_hat
//   biases  = bias_scale * rho * b_hat
// bias_scale is the accumulated scale of the layer's input on the integer
// path (1 for the first layer), so that w_hat . x + b_hat stays exact when x
// is the unscaled output of the previous layer.
struct QuantizedParams {
  IntTensor weights;
  std::vector<std::int64_t> biases;
  double rho = 0.0;
  std::int64_t k = 0;
  double bias_scale = 1.0;

  // weights flattened, then biases.
  PvqPoint point() const;
  std::size_t dimension() const { return weights.size() + biases.size(); }
};

struct Layer {
  LayerKind kind = LayerKind::kInput;
  std::string name;
  Activation activation = Activation::kNone;

  Shape input_shape;         // kInput
  std::size_t units = 0;     // kFullyConnected
  std::size_t filters = 0;   // kConv2d
  std::size_t kernel_h = 0;
  std::size_t kernel_w = 0;
  std::size_t stride = 1;    // kConv2d and kMaxPool
  std::size_t padding = 0;   // kConv2d, zero padding
  std::size_t pool = 0;      // kMaxPool window
  double rate = 0.0;         // kDropout, ignored at inference
  // Power-of-two downshift applied after the activation on the integer path.
  unsigned shift = 0;

  std::variant<std::monostate, FloatParams, QuantizedParams> params;

  bool has_params() const { return kind == LayerKind::kFullyConnected || kind == LayerKind::kConv2d; }
  bool is_quantized() const { return std::holds_alternative<QuantizedParams>(params); }
  bool is_float() const { return std::holds_alternative<FloatParams>(params); }
  const FloatParams& float_params() const;
  const QuantizedParams& quantized_params() const;

  // Number of weight plus bias coordinates.
  std::size_t parameter_count() const;
  Shape weight_shape(const Shape& in) const;
};

Layer MakeInput(Shape shape, std::string name = "IN");
Layer MakeDense(std::string name, std::size_t units, Activation act);
Layer MakeConv2d(std::string name, std::size_t filters, std::size_t kernel_h, std::size_t kernel_w,
                 Activation act, std::size_t stride = 1, std::size_t padding = 0);
Layer MakeMaxPool(std::string name, std::size_t pool, std::size_t stride = 0);
Layer MakeDropout(std::string name, double rate);

struct Network {
  std::string name;
  std::vector<Layer> layers;

  const Shape& input_shape() const;

  // Checks the layer roster and parameter shapes. Returns the output shape
  // of every layer (index-aligned with layers). Throws Error(kShape).
  std::vector<Shape> Validate() const;

  const Layer* find(std::string_view layer_name) const;
};

// Replaces every QuantizedParams by the FloatParams it represents.
Network Dequantize(const Network& net);

}  // namespace pvqnet

#endif  // PVQNET_NETWORK_HPP_
