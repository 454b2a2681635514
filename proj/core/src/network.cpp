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

#include "pvqnet/network.hpp"

#include <utility>

#include "pvqnet/error.hpp"

namespace pvqnet {

std::size_t ShapeSize(const Shape& shape) {
  if (shape.empty()) return 0;
  std::size_t n = 1;
  for (std::size_t d : shape) n *= d;
  return n;
}

std::string ShapeToString(const Shape& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += 'x';
    s += std::to_string(shape[i]);
  }
  return s;
}

std::vector<std::uint8_t> ToBits(const BinaryTensor& t) {
  std::vector<std::uint8_t> bits(t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] == 1) {
      bits[i] = 0;
    } else if (t[i] == -1) {
      bits[i] = 1;
    } else {
      Fail(ErrorKind::kInvalidArgument, "ToBits: binary tensor holds a value other than +1/-1");
    }
  }
  return bits;
}

BinaryTensor FromBits(Shape shape, std::span<const std::uint8_t> bits) {
  std::vector<std::int8_t> v(bits.size());
  for (std::size_t i = 0; i < bits.size(); ++i) v[i] = bits[i] ? -1 : 1;
  return BinaryTensor(std::move(shape), std::move(v));
}

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::kInput:
      return "input";
    case LayerKind::kFullyConnected:
      return "fc";
    case LayerKind::kConv2d:
      return "conv2d";
    case LayerKind::kMaxPool:
      return "maxpool";
    case LayerKind::kDropout:
      return "dropout";
  }
  return "unknown";
}

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::kNone:
      return "none";
    case Activation::kRelu:
      return "relu";
    case Activation::kBsign:
      return "bsign";
  }
  return "unknown";
}

std::optional<LayerKind> parse_layer_kind(std::string_view s) {
  for (LayerKind k : {LayerKind::kInput, LayerKind::kFullyConnected, LayerKind::kConv2d,
                      LayerKind::kMaxPool, LayerKind::kDropout}) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

std::optional<Activation> parse_activation(std::string_view s) {
  for (Activation a : {Activation::kNone, Activation::kRelu, Activation::kBsign}) {
    if (to_string(a) == s) return a;
  }
  return std::nullopt;
}

PvqPoint QuantizedParams::point() const {
  std::vector<std::int64_t> coords;
  coords.reserve(dimension());
  coords.insert(coords.end(), weights.values().begin(), weights.values().end());
  coords.insert(coords.end(), biases.begin(), biases.end());
  return PvqPoint(std::move(coords), k);
}

const FloatParams& Layer::float_params() const {
  if (!is_float()) Fail(ErrorKind::kShape, "layer " + name + " has no float parameters");
  return std::get<FloatParams>(params);
}

const QuantizedParams& Layer::quantized_params() const {
  if (!is_quantized()) Fail(ErrorKind::kShape, "layer " + name + " is not quantized");
  return std::get<QuantizedParams>(params);
}

std::size_t Layer::parameter_count() const {
  if (const auto* f = std::get_if<FloatParams>(&params)) return f->weights.size() + f->biases.size();
  if (const auto* q = std::get_if<QuantizedParams>(&params)) return q->dimension();
  return 0;
}

Shape Layer::weight_shape(const Shape& in) const {
  switch (kind) {
    case LayerKind::kFullyConnected:
      return {units, ShapeSize(in)};
    case LayerKind::kConv2d:
      if (in.size() != 3) Fail(ErrorKind::kShape, "conv2d " + name + " needs a CxHxW input");
      return {filters, in[0], kernel_h, kernel_w};
    default:
      return {};
  }
}

Layer MakeInput(Shape shape, std::string name) {
  Layer l;
  l.kind = LayerKind::kInput;
  l.name = std::move(name);
  l.input_shape = std::move(shape);
  return l;
}

Layer MakeDense(std::string name, std::size_t units, Activation act) {
  Layer l;
  l.kind = LayerKind::kFullyConnected;
  l.name = std::move(name);
  l.units = units;
  l.activation = act;
  return l;
}

Layer MakeConv2d(std::string name, std::size_t filters, std::size_t kernel_h, std::size_t kernel_w,
                 Activation act, std::size_t stride, std::size_t padding) {
  Layer l;
  l.kind = LayerKind::kConv2d;
  l.name = std::move(name);
  l.filters = filters;
  l.kernel_h = kernel_h;
  l.kernel_w = kernel_w;
  l.activation = act;
  l.stride = stride;
  l.padding = padding;
  return l;
}

Layer MakeMaxPool(std::string name, std::size_t pool, std::size_t stride) {
  Layer l;
  l.kind = LayerKind::kMaxPool;
  l.name = std::move(name);
  l.pool = pool;
  l.stride = stride == 0 ? pool : stride;
  return l;
}

Layer MakeDropout(std::string name, double rate) {
  Layer l;
  l.kind = LayerKind::kDropout;
  l.name = std::move(name);
  l.rate = rate;
  return l;
}

const Shape& Network::input_shape() const {
  if (layers.empty() || layers.front().kind != LayerKind::kInput) {
    Fail(ErrorKind::kShape, "network has no input layer");
  }
  return layers.front().input_shape;
}

namespace {

void CheckParamShapes(const Layer& l, const Shape& weight_shape, std::size_t bias_count) {
  auto mismatch = [&](const Shape& got, std::size_t got_bias) {
    Fail(ErrorKind::kShape, "layer " + l.name + ": parameters are " + ShapeToString(got) + " + " +
                                std::to_string(got_bias) + " biases, expected " +
                                ShapeToString(weight_shape) + " + " + std::to_string(bias_count));
  };
  if (const auto* f = std::get_if<FloatParams>(&l.params)) {
    if (f->weights.shape() != weight_shape || f->biases.size() != bias_count) {
      mismatch(f->weights.shape(), f->biases.size());
    }
  } else if (const auto* q = std::get_if<QuantizedParams>(&l.params)) {
    if (q->weights.shape() != weight_shape || q->biases.size() != bias_count) {
      mismatch(q->weights.shape(), q->biases.size());
    }
  } else {
    Fail(ErrorKind::kShape, "layer " + l.name + " has no parameters");
  }
}

}  // namespace

std::vector<Shape> Network::Validate() const {
  if (layers.empty() || layers.front().kind != LayerKind::kInput) {
    Fail(ErrorKind::kShape, "network must start with an input layer");
  }
  std::vector<Shape> out;
  out.reserve(layers.size());
  Shape cur;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    const Layer& l = layers[i];
    if (l.kind == LayerKind::kInput) {
      if (i != 0) Fail(ErrorKind::kShape, "input layer " + l.name + " is not first");
      if (l.input_shape.empty() || ShapeSize(l.input_shape) == 0) {
        Fail(ErrorKind::kShape, "input layer has an empty shape");
      }
      cur = l.input_shape;
      out.push_back(cur);
      continue;
    }
    if (!l.has_params() && !std::holds_alternative<std::monostate>(l.params)) {
      Fail(ErrorKind::kShape, "layer " + l.name + " cannot carry parameters");
    }
    switch (l.kind) {
      case LayerKind::kFullyConnected: {
        if (l.units == 0) Fail(ErrorKind::kShape, "fc " + l.name + " has zero units");
        CheckParamShapes(l, l.weight_shape(cur), l.units);
        cur = {l.units};
        break;
      }
      case LayerKind::kConv2d: {
        if (cur.size() != 3) {
          Fail(ErrorKind::kShape, "conv2d " + l.name + " needs a CxHxW input, got " + ShapeToString(cur));
        }
        if (l.filters == 0 || l.kernel_h == 0 || l.kernel_w == 0 || l.stride == 0) {
          Fail(ErrorKind::kShape, "conv2d " + l.name + " has a zero-sized configuration");
        }
        const std::size_t h = cur[1] + 2 * l.padding;
        const std::size_t w = cur[2] + 2 * l.padding;
        if (h < l.kernel_h || w < l.kernel_w) {
          Fail(ErrorKind::kShape, "conv2d " + l.name + " kernel larger than its input");
        }
        CheckParamShapes(l, l.weight_shape(cur), l.filters);
        cur = {l.filters, (h - l.kernel_h) / l.stride + 1, (w - l.kernel_w) / l.stride + 1};
        break;
      }
      case LayerKind::kMaxPool: {
        if (cur.size() != 3) {
          Fail(ErrorKind::kShape, "maxpool " + l.name + " needs a CxHxW input, got " + ShapeToString(cur));
        }
        if (l.pool == 0 || l.stride == 0 || cur[1] < l.pool || cur[2] < l.pool) {
          Fail(ErrorKind::kShape, "maxpool " + l.name + " window does not fit its input");
        }
        cur = {cur[0], (cur[1] - l.pool) / l.stride + 1, (cur[2] - l.pool) / l.stride + 1};
        break;
      }
      case LayerKind::kDropout:
        if (l.rate < 0.0 || l.rate >= 1.0) {
          Fail(ErrorKind::kShape, "dropout " + l.name + " rate must be in [0, 1)");
        }
        break;
      case LayerKind::kInput:
        break;
    }
    out.push_back(cur);
  }
  return out;
}

const Layer* Network::find(std::string_view layer_name) const {
  for (const Layer& l : layers) {
    if (l.name == layer_name) return &l;
  }
  return nullptr;
}

Network Dequantize(const Network& net) {
  Network out = net;
  for (Layer& l : out.layers) {
    if (!l.is_quantized()) continue;
    const QuantizedParams& q = std::get<QuantizedParams>(l.params);
    FloatParams f;
    std::vector<double> w(q.weights.size());
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = q.rho * static_cast<double>(q.weights[i]);
    f.weights = RealTensor(q.weights.shape(), std::move(w));
    f.biases.resize(q.biases.size());
    for (std::size_t i = 0; i < q.biases.size(); ++i) {
      f.biases[i] = q.bias_scale * q.rho * static_cast<double>(q.biases[i]);
    }
    l.params = std::move(f);
  }
  return out;
}

}  // namespace pvqnet
