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

// Post-training, layer-wise quantization.
//
// Every parameterized layer is flattened (weights row-major, then biases),
// encoded as a single point of P(N, k) and split back into its shapes. No
// refinement is performed after encoding.

#ifndef PVQNET_QUANTIZER_HPP_
#define PVQNET_QUANTIZER_HPP_

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvqnet/kernels.hpp"
#include "pvqnet/network.hpp"

namespace pvqnet {

// N / k as an exact positive fraction.
struct Ratio {
  std::uint64_t num = 1;
  std::uint64_t den = 1;

  // "5", "5/2", "1/3". Throws Error(kShape) on malformed or zero values.
  static Ratio Parse(std::string_view text);
  std::string ToString() const;

  // floor(n / ratio), at least 1. Rounding down keeps k <= n / ratio, so at
  // least n - n / ratio coordinates of the point are zero.
  std::int64_t PulsesFor(std::size_t n) const;
};

struct LayerQuantSpec {
  std::optional<Ratio> ratio;
  std::optional<std::int64_t> k;
};

// How the bias slot is scaled before encoding.
//   kJoint    (w, b) are encoded as they are. On the pvq path each bias enters
//             as a real constant b_hat * bias_scale / P, P being the scale of
//             the layer input.
//   kInteger  the bias slot encodes b / P, so the bias is added as the integer
//             b_hat and integer inputs keep every pre-activation integer. Costs
//             accuracy when P is far from 1.
enum class BiasMode { kJoint, kInteger };
std::string_view to_string(BiasMode m);
std::optional<BiasMode> parse_bias_mode(std::string_view s);

// Per-layer k selection. Explicit entries win over per-kind defaults; a layer
// with neither is left in float.
struct QuantConfig {
  std::map<std::string, LayerQuantSpec> layers;
  std::optional<Ratio> default_fc;
  std::optional<Ratio> default_conv;
  BiasMode bias_mode = BiasMode::kJoint;

  bool empty() const { return layers.empty() && !default_fc && !default_conv; }

  // Text form, one directive per line, '#' comments:
  //   FC0 ratio 5
  //   CONV0 ratio 1/3
  //   FC2 k 1026
  //   default fc ratio 5
  //   default conv ratio 1
  //   bias integer
  static QuantConfig Parse(std::string_view text);

  // Built-in ratio tables: "mnist-a", "cifar10-b",
  // "mnist-c-binary", "cifar10-d-binary".
  static QuantConfig Preset(std::string_view name);
  static std::vector<std::string> PresetNames();
};

// bias_scale is the accumulated scale of the layer's input on the integer
// path; the bias slot encodes biases / bias_scale. Throws Error(kShape) for
// layers without float parameters and Error(kInvalidArgument) for k < 1.
Layer quantize_layer(const Layer& layer, std::int64_t k, double bias_scale = 1.0);

// Bucket order: 0, +-1, +-2..3, +-4..7, others.
inline constexpr std::array<const char*, 5> kBucketLabels = {"0", "+-1", "+-2..3", "+-4..7",
                                                             "Others"};

struct WeightHistogram {
  std::string layer;
  std::array<std::uint64_t, 5> buckets{};
  std::uint64_t total = 0;

  static std::size_t BucketOf(std::int64_t v);
  double percent(std::size_t bucket) const;
};

WeightHistogram histogram_of(std::string layer, std::span<const std::int64_t> coords);

struct LayerReport {
  std::size_t index = 0;
  std::string name;
  LayerKind kind = LayerKind::kInput;
  std::size_t n = 0;
  std::int64_t k = 0;
  double rho = 0.0;
  std::size_t nnz = 0;
  double bias_scale = 1.0;
  WeightHistogram histogram;
};

struct QuantizeResult {
  Network network;
  std::vector<LayerReport> report;
};

// Quantizes front to back. In BiasMode::kInteger each layer's bias slot is
// matched to the scale its input carries on the pvq path (reset to 1 after
// bsign).
QuantizeResult quantize_network(const Network& net, const QuantConfig& cfg);

// One histogram per quantized layer. Throws Error(kShape) when no layer is
// quantized.
std::vector<WeightHistogram> weight_stats(const Network& net);

// Fixed-column table: a count row and a percentage row per layer.
void PrintHistogramTable(std::ostream& os, const std::vector<WeightHistogram>& stats);

// One line per quantized layer: index, name, kind, N, k, rho, nnz and the
// bucket percentages.
void PrintQuantizeReport(std::ostream& os, const std::vector<LayerReport>& report);

struct LabeledSamples {
  Shape sample_shape;
  std::vector<std::uint8_t> pixels;  // count * ShapeSize(sample_shape)
  std::vector<std::uint8_t> labels;

  std::size_t size() const { return labels.size(); }
  IntTensor sample(std::size_t i) const;
};

enum class InferencePath { kFloat, kPvq, kBinary };
std::string_view to_string(InferencePath p);
std::optional<InferencePath> parse_inference_path(std::string_view s);

struct Evaluation {
  double accuracy = 0.0;
  std::size_t correct = 0;
  std::size_t samples = 0;
  DotStats stats;
};

// Fraction of samples whose argmax matches the label. The float path runs on
// the dequantized network when layers are quantized; the pvq and binary
// paths require quantized layers. threads > 1 shards the dataset, results are
// reduced in shard order.
Evaluation evaluate(const Network& net, const LabeledSamples& data, InferencePath path,
                    unsigned threads = 1);

}  // namespace pvqnet

#endif  // PVQNET_QUANTIZER_HPP_
