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

#include "pvqnet/inference.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "pvqnet/error.hpp"

namespace pvqnet {

template <typename T>
Tensor<T> maxpool(const Tensor<T>& in, std::size_t pool, std::size_t stride) {
  const Shape& s = in.shape();
  if (s.size() != 3) Fail(ErrorKind::kShape, "maxpool: expected CxHxW, got " + ShapeToString(s));
  if (pool == 0 || stride == 0 || s[1] < pool || s[2] < pool) {
    Fail(ErrorKind::kShape, "maxpool: window does not fit input " + ShapeToString(s));
  }
  const std::size_t c = s[0], h = s[1], w = s[2];
  const std::size_t oh = (h - pool) / stride + 1, ow = (w - pool) / stride + 1;
  Tensor<T> out({c, oh, ow});
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t oy = 0; oy < oh; ++oy) {
      for (std::size_t ox = 0; ox < ow; ++ox) {
        T m = in[(ch * h + oy * stride) * w + ox * stride];
        for (std::size_t dy = 0; dy < pool; ++dy) {
          for (std::size_t dx = 0; dx < pool; ++dx) {
            m = std::max(m, in[(ch * h + oy * stride + dy) * w + ox * stride + dx]);
          }
        }
        out[(ch * oh + oy) * ow + ox] = m;
      }
    }
  }
  return out;
}

template Tensor<double> maxpool(const Tensor<double>&, std::size_t, std::size_t);
template Tensor<std::int64_t> maxpool(const Tensor<std::int64_t>&, std::size_t, std::size_t);
template Tensor<std::int8_t> maxpool(const Tensor<std::int8_t>&, std::size_t, std::size_t);

namespace {

template <typename T>
Tensor<T> CheckInput(const Network& net, const Tensor<T>& x) {
  const Shape& want = net.input_shape();
  if (ShapeSize(want) != x.size()) {
    Fail(ErrorKind::kShape, "input has shape " + ShapeToString(x.shape()) + ", network expects " +
                                ShapeToString(want));
  }
  return x.shape() == want ? x : x.Reshaped(want);
}

// Receptive field of output (oy, ox) flattened as (channel, ky, kx), matching
// the conv2d weight layout. Out-of-bounds taps read zero.
template <typename T>
void GatherPatch(const Tensor<T>& in, const Layer& l, std::size_t oy, std::size_t ox,
                 std::vector<T>& patch) {
  const std::size_t c = in.shape()[0], h = in.shape()[1], w = in.shape()[2];
  patch.resize(c * l.kernel_h * l.kernel_w);
  std::size_t p = 0;
  for (std::size_t ch = 0; ch < c; ++ch) {
    for (std::size_t ky = 0; ky < l.kernel_h; ++ky) {
      const std::ptrdiff_t y = static_cast<std::ptrdiff_t>(oy * l.stride + ky) -
                               static_cast<std::ptrdiff_t>(l.padding);
      for (std::size_t kx = 0; kx < l.kernel_w; ++kx) {
        const std::ptrdiff_t xx = static_cast<std::ptrdiff_t>(ox * l.stride + kx) -
                                  static_cast<std::ptrdiff_t>(l.padding);
        const bool inside = y >= 0 && xx >= 0 && y < static_cast<std::ptrdiff_t>(h) &&
                            xx < static_cast<std::ptrdiff_t>(w);
        patch[p++] = inside ? in[(ch * h + static_cast<std::size_t>(y)) * w +
                                 static_cast<std::size_t>(xx)]
                            : T{0};
      }
    }
  }
}

// Runs a fully connected or conv2d layer given a per-neuron kernel
// dot(neuron, inputs) -> value.
template <typename T, typename Dot>
Tensor<T> LinearLayer(const Layer& l, const Tensor<T>& in, const Shape& out_shape, Dot&& dot) {
  Tensor<T> out(out_shape);
  if (l.kind == LayerKind::kFullyConnected) {
    for (std::size_t j = 0; j < l.units; ++j) out[j] = dot(j, in.data());
    return out;
  }
  const std::size_t oh = out_shape[1], ow = out_shape[2];
  std::vector<T> patch;
  for (std::size_t oy = 0; oy < oh; ++oy) {
    for (std::size_t ox = 0; ox < ow; ++ox) {
      GatherPatch(in, l, oy, ox, patch);
      for (std::size_t f = 0; f < l.filters; ++f) {
        out[(f * oh + oy) * ow + ox] = dot(f, std::span<const T>(patch));
      }
    }
  }
  return out;
}

template <typename T>
void ApplyRelu(Tensor<T>& t) {
  for (T& v : t.data()) v = std::max(v, T{0});
}

template <typename T>
void ApplyBsign(Tensor<T>& t) {
  for (T& v : t.data()) v = static_cast<T>(bsign(v));
}

// Adds the bias of a neuron. The bias is one addition, or a plain load when
// the weight row was empty.
template <typename T>
T AddBias(T acc, bool loaded, T bias, DotStats& stats) {
  if (bias == T{0}) return acc;
  if (!loaded) return bias;
  ++stats.additions;
  if constexpr (std::is_same_v<T, std::int64_t>) {
    T r;
    if (__builtin_add_overflow(acc, bias, &r)) {
      Fail(ErrorKind::kOverflow, "bias addition overflows int64");
    }
    return r;
  } else {
    return acc + bias;
  }
}

bool SameScale(double a, double b) { return std::fabs(a - b) <= 1e-9 * std::fabs(b); }

// Scale of each layer's input on the pvq path, index-aligned with layers.
std::vector<double> InputScales(const Network& net) {
  std::vector<double> scales(net.layers.size(), 1.0);
  double scale = 1.0;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const Layer& l = net.layers[li];
    scales[li] = scale;
    if (!l.has_params()) continue;
    scale = l.is_quantized() ? scale * l.quantized_params().rho * std::ldexp(1.0, static_cast<int>(l.shift))
                             : 1.0;
    if (l.activation == Activation::kBsign) scale = 1.0;
  }
  return scales;
}

struct RowInfo {
  std::size_t width = 0;
  std::vector<bool> nonempty;
};

RowInfo DescribeRows(const QuantizedParams& q) {
  RowInfo info;
  const std::size_t rows = q.biases.size();
  info.width = rows == 0 ? 0 : q.weights.size() / rows;
  info.nonempty.resize(rows);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto row = q.weights.data().subspan(r * info.width, info.width);
    info.nonempty[r] = std::any_of(row.begin(), row.end(), [](std::int64_t v) { return v != 0; });
  }
  return info;
}

[[noreturn]] void Rethrow(const Error& e, std::size_t index, const Layer& l) {
  throw Error(e.kind(), "layer " + std::to_string(index) + " (" + l.name + "): " + e.what());
}

template <typename T>
T ShiftDown(T v, unsigned shift) {
  if (shift == 0) return v;
  if constexpr (std::is_same_v<T, std::int64_t>) {
    return v >> shift;
  } else {
    return std::ldexp(v, -static_cast<int>(shift));
  }
}

template <typename T>
PvqOutput<T> ForwardPvqImpl(const Network& net, const Tensor<T>& x) {
  const std::vector<Shape> shapes = net.Validate();
  Tensor<T> cur = CheckInput(net, x);
  PvqOutput<T> result;
  double scale = 1.0;  // real value = scale * integer-path value
  for (std::size_t li = 1; li < net.layers.size(); ++li) {
    const Layer& l = net.layers[li];
    try {
      switch (l.kind) {
        case LayerKind::kFullyConnected:
        case LayerKind::kConv2d: {
          if (!l.is_quantized()) {
            Fail(ErrorKind::kShape, "forward_pvq needs quantized parameters");
          }
          if (l.activation == Activation::kBsign) {
            Fail(ErrorKind::kInvalidArgument,
                 "bsign is not positively homogeneous; use forward_binary");
          }
          const QuantizedParams& q = l.quantized_params();
          // Model constants: the bias in units of this layer's accumulator.
          std::vector<T> bias(q.biases.size());
          if constexpr (std::is_same_v<T, std::int64_t>) {
            const bool has_bias = std::any_of(q.biases.begin(), q.biases.end(),
                                              [](std::int64_t b) { return b != 0; });
            if (has_bias && !SameScale(q.bias_scale, scale)) {
              Fail(ErrorKind::kShape, "bias was quantized for input scale " + std::to_string(q.bias_scale) +
                                          " but the layer input has scale " + std::to_string(scale) +
                                          "; use real-valued inputs or quantize with integer biases");
            }
            std::copy(q.biases.begin(), q.biases.end(), bias.begin());
          } else {
            const double ratio = SameScale(q.bias_scale, scale) ? 1.0 : q.bias_scale / scale;
            for (std::size_t r = 0; r < bias.size(); ++r) bias[r] = static_cast<double>(q.biases[r]) * ratio;
          }
          const RowInfo rows = DescribeRows(q);
          auto dot = [&](std::size_t r, std::span<const T> in) -> T {
            const auto row = q.weights.data().subspan(r * rows.width, rows.width);
            auto d = dot_addsub(row, in);
            result.stats += d.stats;
            return AddBias<T>(d.value, rows.nonempty[r], bias[r], result.stats);
          };
          Tensor<T> in = l.kind == LayerKind::kFullyConnected && cur.shape().size() != 1
                             ? cur.Reshaped({cur.size()})
                             : cur;
          cur = LinearLayer(l, in, shapes[li], dot);
          if (l.activation == Activation::kRelu) ApplyRelu(cur);
          for (T& v : cur.data()) v = ShiftDown(v, l.shift);
          scale *= q.rho * std::ldexp(1.0, static_cast<int>(l.shift));
          break;
        }
        case LayerKind::kMaxPool:
          cur = maxpool(cur, l.pool, l.stride);
          break;
        case LayerKind::kDropout:
        case LayerKind::kInput:
          break;
      }
    } catch (const Error& e) {
      Rethrow(e, li, l);
    }
  }
  result.logits = std::move(cur);
  result.rho_total = scale;
  return result;
}

}  // namespace

RealTensor forward_float(const Network& net, const RealTensor& x, DotStats* stats) {
  const std::vector<Shape> shapes = net.Validate();
  RealTensor cur = CheckInput(net, x);
  DotStats local;
  for (std::size_t li = 1; li < net.layers.size(); ++li) {
    const Layer& l = net.layers[li];
    switch (l.kind) {
      case LayerKind::kFullyConnected:
      case LayerKind::kConv2d: {
        if (l.is_quantized()) {
          Fail(ErrorKind::kShape, "forward_float: layer " + l.name +
                                      " is quantized; dequantize the network first");
        }
        const FloatParams& f = l.float_params();
        const std::size_t width = f.weights.size() / f.biases.size();
        auto dot = [&](std::size_t r, std::span<const double> in) {
          local.multiplications += width;
          local.additions += width;  // width - 1 products summed, plus the bias
          return dot_reference(f.weights.data().subspan(r * width, width), in) + f.biases[r];
        };
        RealTensor in = l.kind == LayerKind::kFullyConnected && cur.shape().size() != 1
                            ? cur.Reshaped({cur.size()})
                            : cur;
        cur = LinearLayer(l, in, shapes[li], dot);
        if (l.activation == Activation::kRelu) ApplyRelu(cur);
        if (l.activation == Activation::kBsign) ApplyBsign(cur);
        break;
      }
      case LayerKind::kMaxPool:
        cur = maxpool(cur, l.pool, l.stride);
        break;
      case LayerKind::kDropout:
      case LayerKind::kInput:
        break;
    }
  }
  if (stats) *stats += local;
  return cur;
}

bool has_integer_biases(const Network& net) {
  const std::vector<double> scales = InputScales(net);
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const Layer& l = net.layers[li];
    if (!l.is_quantized()) continue;
    const QuantizedParams& q = l.quantized_params();
    const bool has_bias = std::any_of(q.biases.begin(), q.biases.end(), [](std::int64_t b) { return b != 0; });
    if (has_bias && !SameScale(q.bias_scale, scales[li])) return false;
  }
  return true;
}

PvqOutput<std::int64_t> forward_pvq(const Network& net, const IntTensor& x) {
  return ForwardPvqImpl(net, x);
}

PvqOutput<double> forward_pvq(const Network& net, const RealTensor& x) {
  return ForwardPvqImpl(net, x);
}

BinaryOutput forward_binary(const Network& net, const IntTensor& x) {
  const std::vector<Shape> shapes = net.Validate();
  IntTensor cur = CheckInput(net, x);
  BinaryOutput result;
  std::size_t last_param = 0;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    if (net.layers[li].has_params()) last_param = li;
  }
  bool binary = false;
  for (std::size_t li = 1; li < net.layers.size(); ++li) {
    const Layer& l = net.layers[li];
    try {
      switch (l.kind) {
        case LayerKind::kFullyConnected:
        case LayerKind::kConv2d: {
          if (!l.is_quantized()) {
            Fail(ErrorKind::kShape, "forward_binary needs quantized parameters");
          }
          if (li != last_param && l.activation != Activation::kBsign) {
            Fail(ErrorKind::kInvalidArgument, "hidden layer activation is " +
                                                  std::string(to_string(l.activation)) +
                                                  ", binary nets need bsign");
          }
          if (l.activation == Activation::kRelu) {
            Fail(ErrorKind::kInvalidArgument, "relu output layer in a binary net");
          }
          const QuantizedParams& q = l.quantized_params();
          // Inputs are the raw integers or +/-1, both of scale 1.
          if (!SameScale(q.bias_scale, 1.0)) {
            Fail(ErrorKind::kShape, "bias was quantized for input scale " + std::to_string(q.bias_scale) +
                                        ", binary layers take inputs of scale 1");
          }
          const RowInfo rows = DescribeRows(q);
          auto dot = [&](std::size_t r, std::span<const std::int64_t> in) -> std::int64_t {
            const auto row = q.weights.data().subspan(r * rows.width, rows.width);
            auto d = dot_addsub(row, in);
            result.stats += d.stats;
            return AddBias<std::int64_t>(d.value, rows.nonempty[r], q.biases[r], result.stats);
          };
          IntTensor in = l.kind == LayerKind::kFullyConnected && cur.shape().size() != 1
                             ? cur.Reshaped({cur.size()})
                             : cur;
          cur = LinearLayer(l, in, shapes[li], dot);
          binary = l.activation == Activation::kBsign;
          if (binary) ApplyBsign(cur);
          break;
        }
        case LayerKind::kMaxPool: {
          if (!binary) {
            cur = maxpool(cur, l.pool, l.stride);
            break;
          }
          // Max over +/-1 is the AND of the bit encoding.
          const Shape& s = cur.shape();
          const std::size_t c = s[0], h = s[1], w = s[2];
          const Shape& os = shapes[li];
          const std::size_t oh = os[1], ow = os[2];
          std::vector<std::uint8_t> window(l.pool * l.pool);
          IntTensor out(os);
          for (std::size_t ch = 0; ch < c; ++ch) {
            for (std::size_t oy = 0; oy < oh; ++oy) {
              for (std::size_t ox = 0; ox < ow; ++ox) {
                std::size_t p = 0;
                for (std::size_t dy = 0; dy < l.pool; ++dy) {
                  for (std::size_t dx = 0; dx < l.pool; ++dx) {
                    const std::int64_t v = cur[(ch * h + oy * l.stride + dy) * w + ox * l.stride + dx];
                    window[p++] = v < 0 ? 1 : 0;
                  }
                }
                out[(ch * oh + oy) * ow + ox] = binary_max_bits(window) ? -1 : 1;
              }
            }
          }
          cur = std::move(out);
          break;
        }
        case LayerKind::kDropout:
        case LayerKind::kInput:
          break;
      }
    } catch (const Error& e) {
      Rethrow(e, li, l);
    }
  }
  result.output = std::move(cur);
  result.binary = binary;
  return result;
}

}  // namespace pvqnet
