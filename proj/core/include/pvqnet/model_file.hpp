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

// Model files.
//
//   "PVQNET01" | u32 LE header length | text header | body
//
// The header is one record per line ("name ..." then "layer NAME key=value
// ..."). The body holds, per parameterized layer, its weights then biases:
// f32 LE for float layers, i32 LE coordinates for quantized layers.
//
// Compressed models ("PVQCMP01") share the header; a quantized layer's body
// is a u64 LE byte count followed by one codec container. See
// docs/FORMATS.md.

#ifndef PVQNET_MODEL_FILE_HPP_
#define PVQNET_MODEL_FILE_HPP_

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "pvqnet/codec.hpp"
#include "pvqnet/network.hpp"

namespace pvqnet {

inline constexpr std::string_view kModelMagic = "PVQNET01";
inline constexpr std::string_view kCompressedMagic = "PVQCMP01";

std::string model_header(const Network& net);

// Throws Error(kShape) for a network that does not validate and
// Error(kOverflow) for coordinates outside int32.
std::vector<std::uint8_t> serialize_model(const Network& net);
// Throws Error(kFormat) on malformed input.
Network parse_model(std::span<const std::uint8_t> bytes);

Network read_model(const std::filesystem::path& path);
void write_model(const std::filesystem::path& path, const Network& net);

struct CompressOptions {
  CodecId codec = CodecId::kExpGolomb;
  std::uint32_t huffman_threshold = 8;  // V, values with |v| >= V are escaped
};

struct LayerCompression {
  std::string name;
  std::size_t n = 0;
  std::int64_t k = 0;
  std::uint64_t payload_bits = 0;
  std::size_t container_bytes = 0;

  double bits_per_weight() const {
    return n ? static_cast<double>(payload_bits) / static_cast<double>(n) : 0.0;
  }
};

struct CompressedModel {
  std::vector<std::uint8_t> bytes;
  std::vector<LayerCompression> layers;  // quantized layers only
};

// Requires at least one quantized layer (Error(kShape) otherwise). Float
// layers are stored raw.
CompressedModel compress_model(const Network& net, const CompressOptions& options);
Network decompress_model(std::span<const std::uint8_t> bytes);

}  // namespace pvqnet

#endif  // PVQNET_MODEL_FILE_HPP_
