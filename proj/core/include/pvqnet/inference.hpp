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

// Forward passes.
//
//   forward_float   real arithmetic on FloatParams.
//   forward_pvq     add/sub only on QuantizedParams. Each layer's rho is
//                   left out and multiplied into rho_total instead, which is
//                   valid for relu/none activations and maxpool. Integer
//                   inputs keep the whole pass in int64.
//   forward_binary  bsign hidden activations absorb rho entirely; after the
//                   first layer every dot product adds or subtracts +/-1.
//
// All passes are reentrant; networks are only read. Inputs are accepted when
// their element count matches the network input shape.

#ifndef PVQNET_INFERENCE_HPP_
#define PVQNET_INFERENCE_HPP_

#include <cstdint>
#include <span>

#include "pvqnet/kernels.hpp"
#include "pvqnet/network.hpp"
#include "pvqnet/tensor.hpp"

namespace pvqnet {

// Throws Error(kShape) on shape mismatch or if any layer is quantized. When
// stats is given, every multiply-accumulate is recorded.
RealTensor forward_float(const Network& net, const RealTensor& x, DotStats* stats = nullptr);

template <typename T>
struct PvqOutput {
  Tensor<T> logits;
  double rho_total = 1.0;
  DotStats stats;
};

// True when every bias slot was scaled to its layer's input scale (or is
// zero), so integer inputs give integer pre-activations throughout.
bool has_integer_biases(const Network& net);

// Biases are added once per neuron as b_hat * bias_scale / P, P being the
// scale of the layer input; this constant depends only on the model. The
// integer overload requires has_integer_biases(net).
// Throws Error(kShape) for float layers or non-integer biases on the integer
// overload, Error(kInvalidArgument) for bsign activations and
// Error(kOverflow) naming the layer on accumulator overflow.
PvqOutput<std::int64_t> forward_pvq(const Network& net, const IntTensor& x);
PvqOutput<double> forward_pvq(const Network& net, const RealTensor& x);

struct BinaryOutput {
  // Output of the last layer: +/-1 when it ends in bsign, integer
  // accumulator values for a linear classifier head.
  IntTensor output;
  bool binary = false;
  DotStats stats;
};

// Throws Error(kInvalidArgument) when a hidden parameterized layer does not
// use bsign.
BinaryOutput forward_binary(const Network& net, const IntTensor& x);

// bsign(v) = +1 for v >= 0, -1 otherwise.
template <typename T>
constexpr std::int8_t bsign(T v) {
  return v >= T{0} ? std::int8_t{1} : std::int8_t{-1};
}

// Max of +/-1 values in bit form (0 is +1, 1 is -1): the AND of the bits.
inline std::uint8_t binary_max_bits(std::span<const std::uint8_t> bits) {
  std::uint8_t r = 1;
  for (std::uint8_t b : bits) r &= b;
  return r;
}

// Per-channel window max over a CxHxW tensor.
template <typename T>
Tensor<T> maxpool(const Tensor<T>& in, std::size_t pool, std::size_t stride);

// Index of the largest value, lowest index on ties.
template <typename T>
std::size_t argmax(std::span<const T> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best]) best = i;
  }
  return best;
}

}  // namespace pvqnet

#endif  // PVQNET_INFERENCE_HPP_
