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

// Lossless coding of quantized weight vectors.
//
//   exp-golomb      zigzag map then order-0 exponential Golomb per value
//   rle-zero        alternating zero-run / non-zero value records
//   huffman-escape  canonical Huffman over |v| < V plus an escape symbol
//   pvq-index       fixed-width lattice index, ceil(log2 N_p(n, k)) bits
//
// Container layout is described in docs/FORMATS.md.

#ifndef PVQNET_CODEC_HPP_
#define PVQNET_CODEC_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "pvqnet/pvq.hpp"

namespace pvqnet {

enum class CodecId : std::uint8_t {
  kExpGolomb = 1,
  kRleZero = 2,
  kHuffmanEscape = 3,
  kPvqIndex = 4,
};

std::string_view to_string(CodecId id);
// Accepts "golomb", "rle", "huffman", "index" and the canonical names.
std::optional<CodecId> parse_codec(std::string_view name);

struct HuffmanTable {
  std::uint32_t threshold = 0;      // V
  std::uint8_t residual_bits = 0;   // width of |v| - V for escaped values
  // Code length per symbol; symbol s < 2V - 1 is the value UnZigZag(s), the
  // last symbol is the escape. Zero means unused.
  std::vector<std::uint8_t> lengths;
};

struct Bitstream {
  CodecId codec = CodecId::kExpGolomb;
  std::uint64_t n = 0;  // number of coded values
  std::uint64_t k = 0;  // sum of |values|
  HuffmanTable huffman;  // kHuffmanEscape only
  std::vector<std::uint8_t> payload;  // MSB-first, zero padded
  std::uint64_t bit_length = 0;

  std::size_t header_bytes() const;
  std::vector<std::uint8_t> Serialize() const;
  // Parses one container from the front of bytes; *consumed receives its
  // size. Throws Error(kFormat).
  static Bitstream Parse(std::span<const std::uint8_t> bytes, std::size_t* consumed = nullptr);
};

Bitstream golomb_encode(std::span<const std::int64_t> coords);
std::vector<std::int64_t> golomb_decode(const Bitstream& b, std::size_t count);

Bitstream rle_encode(std::span<const std::int64_t> coords);
std::vector<std::int64_t> rle_decode(const Bitstream& b, std::size_t count);

Bitstream huffman_encode(std::span<const std::int64_t> coords, std::uint32_t v_threshold);
std::vector<std::int64_t> huffman_decode(const Bitstream& b, std::size_t count);

// Index coding keeps O(k) rows of big integers and does O(n * k) additions;
// it is refused beyond these limits.
inline constexpr std::uint64_t kIndexMaxCells = std::uint64_t{1} << 24;  // n * (k + 1)
inline constexpr std::size_t kIndexMaxBits = std::size_t{1} << 16;
// True when index coding of P(n, k) is within the limits.
bool index_codec_feasible(std::size_t n, std::int64_t k);

Bitstream index_encode(const PvqPoint& p);
PvqPoint index_decode(const Bitstream& b);

// Dispatch on b.codec; count is b.n.
std::vector<std::int64_t> decode(const Bitstream& b);

// Payload bits per coded value, header excluded.
double bits_per_weight(const Bitstream& b, std::size_t n);

}  // namespace pvqnet

#endif  // PVQNET_CODEC_HPP_
