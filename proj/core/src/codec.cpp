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

#include "pvqnet/codec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <queue>
#include <string>
#include <utility>

#include "pvqnet/bitio.hpp"
#include "pvqnet/error.hpp"
#include "pvqnet/index.hpp"

namespace pvqnet {
namespace {

constexpr std::int64_t kMaxMagnitude = std::int64_t{1} << 62;
constexpr unsigned kMaxCodeLength = 32;
constexpr std::uint32_t kMaxThreshold = 65536;
// codec id, n, k, payload bit length
constexpr std::size_t kFixedHeader = 1 + 8 + 8 + 8;

std::uint64_t CheckedK(std::span<const std::int64_t> coords) {
  std::uint64_t k = 0;
  for (std::int64_t v : coords) {
    if (v <= -kMaxMagnitude || v >= kMaxMagnitude) {
      Fail(ErrorKind::kOverflow, "coordinate magnitude " + std::to_string(v) + " too large to code");
    }
    const auto a = static_cast<std::uint64_t>(v < 0 ? -v : v);
    if (__builtin_add_overflow(k, a, &k)) Fail(ErrorKind::kOverflow, "pulse count overflows 64 bits");
  }
  return k;
}

Bitstream Finish(CodecId id, std::span<const std::int64_t> coords, std::uint64_t k, BitWriter& w) {
  Bitstream b;
  b.codec = id;
  b.n = coords.size();
  b.k = k;
  b.bit_length = w.bit_length();
  b.payload = w.Take();
  return b;
}

void ExpectCodec(const Bitstream& b, CodecId id) {
  if (b.codec != id) {
    Fail(ErrorKind::kFormat, "bitstream holds " + std::string(to_string(b.codec)) + ", expected " +
                                 std::string(to_string(id)));
  }
}

void ExpectCount(const Bitstream& b, std::size_t count) {
  if (b.n != count) {
    Fail(ErrorKind::kShape, "bitstream holds " + std::to_string(b.n) + " values, expected " +
                                std::to_string(count));
  }
}

// Rejects trailing bits and a pulse total that disagrees with the header.
void Conclude(const Bitstream& b, const BitReader& r, const std::vector<std::int64_t>& out) {
  if (r.remaining() != 0) Fail(ErrorKind::kFormat, "trailing bits after the last value");
  std::uint64_t k = 0;
  for (std::int64_t v : out) k += static_cast<std::uint64_t>(v < 0 ? -v : v);
  if (k != b.k) Fail(ErrorKind::kFormat, "decoded pulse count does not match the header");
}

std::int64_t ValueFromZigZag(std::uint64_t u) {
  if (u >= (std::uint64_t{1} << 63) - 1) Fail(ErrorKind::kFormat, "coded value out of range");
  return UnZigZag(u);
}

void PutU64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int s = 56; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(v >> s));
}

std::uint64_t GetU64(std::span<const std::uint8_t> in, std::size_t at) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < 8; ++i) v = (v << 8) | in[at + i];
  return v;
}

// ---- Huffman --------------------------------------------------------------

// Code lengths for the given frequencies (zero frequency -> unused symbol).
std::vector<std::uint8_t> BuildLengths(std::vector<std::uint64_t> freq) {
  const std::size_t m = freq.size();
  std::vector<std::uint8_t> lengths(m, 0);
  for (;;) {
    std::size_t used = 0;
    for (std::uint64_t f : freq) used += f ? 1 : 0;
    if (used == 0) return lengths;
    if (used == 1) {
      for (std::size_t s = 0; s < m; ++s) lengths[s] = freq[s] ? 1 : 0;
      return lengths;
    }
    // Nodes 0..m-1 are leaves; internal nodes are appended. Ties break on node
    // id so the table is deterministic.
    std::vector<std::size_t> parent(m, SIZE_MAX);
    using Item = std::pair<std::uint64_t, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    for (std::size_t s = 0; s < m; ++s) {
      if (freq[s]) heap.emplace(freq[s], s);
    }
    while (heap.size() > 1) {
      const Item a = heap.top();
      heap.pop();
      const Item b = heap.top();
      heap.pop();
      const std::size_t id = parent.size();
      parent.push_back(SIZE_MAX);
      parent[a.second] = id;
      parent[b.second] = id;
      heap.emplace(a.first + b.first, id);
    }
    // Parents always have larger ids, so depths resolve in one reverse pass.
    std::vector<unsigned> depth(parent.size(), 0);
    for (std::size_t id = parent.size(); id-- > 0;) {
      if (parent[id] != SIZE_MAX) depth[id] = depth[parent[id]] + 1;
    }
    unsigned longest = 0;
    for (std::size_t s = 0; s < m; ++s) {
      if (freq[s]) longest = std::max(longest, depth[s]);
    }
    if (longest <= kMaxCodeLength) {
      for (std::size_t s = 0; s < m; ++s) lengths[s] = freq[s] ? static_cast<std::uint8_t>(depth[s]) : 0;
      return lengths;
    }
    for (std::uint64_t& f : freq) {
      if (f) f = (f + 1) / 2;
    }
  }
}

struct Canonical {
  std::vector<std::uint32_t> codes;        // per symbol
  std::vector<std::uint32_t> sorted;       // symbols by (length, symbol)
  std::array<std::uint32_t, kMaxCodeLength + 1> count{};  // per length
};

Canonical MakeCanonical(const std::vector<std::uint8_t>& lengths) {
  Canonical c;
  c.codes.assign(lengths.size(), 0);
  for (std::size_t s = 0; s < lengths.size(); ++s) {
    if (lengths[s] > kMaxCodeLength) Fail(ErrorKind::kFormat, "Huffman code length exceeds 32");
    if (lengths[s]) {
      c.sorted.push_back(static_cast<std::uint32_t>(s));
      ++c.count[lengths[s]];
    }
  }
  std::stable_sort(c.sorted.begin(), c.sorted.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return lengths[a] < lengths[b]; });
  // Kraft sum must not exceed one.
  std::uint64_t code = 0;
  unsigned len = 0;
  for (std::uint32_t s : c.sorted) {
    code <<= (lengths[s] - len);
    len = lengths[s];
    if (code >> len) Fail(ErrorKind::kFormat, "Huffman code lengths are over-subscribed");
    c.codes[s] = static_cast<std::uint32_t>(code);
    ++code;
  }
  return c;
}

std::uint32_t DecodeSymbol(BitReader& r, const Canonical& c) {
  std::uint64_t code = 0;
  std::uint64_t first = 0;
  std::size_t index = 0;
  for (unsigned len = 1; len <= kMaxCodeLength; ++len) {
    code |= r.GetBit();
    const std::uint64_t n = c.count[len];
    if (code - first < n) return c.sorted[index + (code - first)];
    index += n;
    first = (first + n) << 1;
    code <<= 1;
  }
  Fail(ErrorKind::kFormat, "invalid Huffman code");
}

}  // namespace

std::string_view to_string(CodecId id) {
  switch (id) {
    case CodecId::kExpGolomb:
      return "exp-golomb";
    case CodecId::kRleZero:
      return "rle-zero";
    case CodecId::kHuffmanEscape:
      return "huffman-escape";
    case CodecId::kPvqIndex:
      return "pvq-index";
  }
  return "unknown";
}

std::optional<CodecId> parse_codec(std::string_view name) {
  if (name == "golomb" || name == "exp-golomb") return CodecId::kExpGolomb;
  if (name == "rle" || name == "rle-zero") return CodecId::kRleZero;
  if (name == "huffman" || name == "huffman-escape") return CodecId::kHuffmanEscape;
  if (name == "index" || name == "pvq-index") return CodecId::kPvqIndex;
  return std::nullopt;
}

std::size_t Bitstream::header_bytes() const {
  std::size_t h = kFixedHeader;
  if (codec == CodecId::kHuffmanEscape) h += 4 + 1 + huffman.lengths.size();
  return h;
}

std::vector<std::uint8_t> Bitstream::Serialize() const {
  std::vector<std::uint8_t> out;
  out.reserve(header_bytes() + payload.size());
  out.push_back(static_cast<std::uint8_t>(codec));
  PutU64(out, n);
  PutU64(out, k);
  PutU64(out, bit_length);
  if (codec == CodecId::kHuffmanEscape) {
    for (int s = 24; s >= 0; s -= 8) out.push_back(static_cast<std::uint8_t>(huffman.threshold >> s));
    out.push_back(huffman.residual_bits);
    out.insert(out.end(), huffman.lengths.begin(), huffman.lengths.end());
  }
  out.insert(out.end(), payload.begin(), payload.end());
  return out;
}

Bitstream Bitstream::Parse(std::span<const std::uint8_t> bytes, std::size_t* consumed) {
  if (bytes.size() < kFixedHeader) Fail(ErrorKind::kFormat, "truncated codec header");
  Bitstream b;
  const std::uint8_t id = bytes[0];
  if (id < 1 || id > 4) Fail(ErrorKind::kFormat, "unknown codec id " + std::to_string(id));
  b.codec = static_cast<CodecId>(id);
  b.n = GetU64(bytes, 1);
  b.k = GetU64(bytes, 9);
  b.bit_length = GetU64(bytes, 17);
  std::size_t at = kFixedHeader;
  if (b.codec == CodecId::kHuffmanEscape) {
    if (bytes.size() < at + 5) Fail(ErrorKind::kFormat, "truncated Huffman header");
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v = (v << 8) | bytes[at + i];
    if (v < 1 || v > kMaxThreshold) Fail(ErrorKind::kFormat, "Huffman threshold out of range");
    b.huffman.threshold = v;
    b.huffman.residual_bits = bytes[at + 4];
    if (b.huffman.residual_bits > 62) Fail(ErrorKind::kFormat, "Huffman residual width out of range");
    at += 5;
    const std::size_t symbols = 2 * static_cast<std::size_t>(v);
    if (bytes.size() - at < symbols) Fail(ErrorKind::kFormat, "truncated Huffman code lengths");
    b.huffman.lengths.assign(bytes.begin() + static_cast<std::ptrdiff_t>(at),
                             bytes.begin() + static_cast<std::ptrdiff_t>(at + symbols));
    at += symbols;
  }
  if (b.bit_length > (std::uint64_t{1} << 60)) Fail(ErrorKind::kFormat, "payload bit length out of range");
  const std::size_t payload_bytes = static_cast<std::size_t>((b.bit_length + 7) / 8);
  if (bytes.size() - at < payload_bytes) Fail(ErrorKind::kFormat, "truncated payload");
  b.payload.assign(bytes.begin() + static_cast<std::ptrdiff_t>(at),
                   bytes.begin() + static_cast<std::ptrdiff_t>(at + payload_bytes));
  if (b.bit_length % 8 != 0) {
    const auto pad_mask = static_cast<std::uint8_t>(0xFFu >> (b.bit_length % 8));
    if (b.payload.back() & pad_mask) Fail(ErrorKind::kFormat, "non-zero padding bits");
  }
  if (consumed) *consumed = at + payload_bytes;
  return b;
}

// ---- exp-golomb -------------------------------------------------------------

Bitstream golomb_encode(std::span<const std::int64_t> coords) {
  const std::uint64_t k = CheckedK(coords);
  BitWriter w;
  for (std::int64_t v : coords) w.PutExpGolomb(ZigZag(v));
  return Finish(CodecId::kExpGolomb, coords, k, w);
}

std::vector<std::int64_t> golomb_decode(const Bitstream& b, std::size_t count) {
  ExpectCodec(b, CodecId::kExpGolomb);
  ExpectCount(b, count);
  BitReader r(b.payload, b.bit_length);
  std::vector<std::int64_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(ValueFromZigZag(r.GetExpGolomb()));
  Conclude(b, r, out);
  return out;
}

// ---- rle-zero ---------------------------------------------------------------
// Records alternate: EG0(zero run length), then EG0(zigzag(v) - 1) for the
// non-zero value that ends the run. A trailing run has no value.

Bitstream rle_encode(std::span<const std::int64_t> coords) {
  const std::uint64_t k = CheckedK(coords);
  BitWriter w;
  std::uint64_t run = 0;
  for (std::int64_t v : coords) {
    if (v == 0) {
      ++run;
      continue;
    }
    w.PutExpGolomb(run);
    w.PutExpGolomb(ZigZag(v) - 1);
    run = 0;
  }
  if (run > 0 || coords.empty()) w.PutExpGolomb(run);
  return Finish(CodecId::kRleZero, coords, k, w);
}

std::vector<std::int64_t> rle_decode(const Bitstream& b, std::size_t count) {
  ExpectCodec(b, CodecId::kRleZero);
  ExpectCount(b, count);
  BitReader r(b.payload, b.bit_length);
  std::vector<std::int64_t> out;
  out.reserve(count);
  for (;;) {
    const std::uint64_t run = r.GetExpGolomb();
    if (run > count - out.size()) Fail(ErrorKind::kFormat, "zero run overruns the vector");
    out.insert(out.end(), static_cast<std::size_t>(run), 0);
    if (out.size() == count) break;
    const std::uint64_t u = r.GetExpGolomb();
    out.push_back(ValueFromZigZag(u + 1));
    if (out.size() == count) break;
  }
  Conclude(b, r, out);
  return out;
}

// ---- huffman-escape ---------------------------------------------------------

Bitstream huffman_encode(std::span<const std::int64_t> coords, std::uint32_t v_threshold) {
  if (v_threshold < 1 || v_threshold > kMaxThreshold) {
    Fail(ErrorKind::kInvalidArgument, "Huffman threshold must be in [1, 65536]");
  }
  const std::uint64_t k = CheckedK(coords);
  const std::size_t symbols = 2 * static_cast<std::size_t>(v_threshold);
  const std::uint32_t esc = static_cast<std::uint32_t>(symbols - 1);
  const std::uint64_t v = v_threshold;

  std::vector<std::uint64_t> freq(symbols, 0);
  std::uint64_t max_excess = 0;
  for (std::int64_t x : coords) {
    const auto a = static_cast<std::uint64_t>(x < 0 ? -x : x);
    if (a < v) {
      ++freq[ZigZag(x)];
    } else {
      ++freq[esc];
      max_excess = std::max(max_excess, a - v);
    }
  }

  Bitstream b;
  b.huffman.threshold = v_threshold;
  b.huffman.residual_bits = static_cast<std::uint8_t>(std::bit_width(max_excess));
  b.huffman.lengths = BuildLengths(freq);
  const Canonical c = MakeCanonical(b.huffman.lengths);

  BitWriter w;
  for (std::int64_t x : coords) {
    const auto a = static_cast<std::uint64_t>(x < 0 ? -x : x);
    const std::uint32_t s = a < v ? static_cast<std::uint32_t>(ZigZag(x)) : esc;
    w.PutBits(c.codes[s], b.huffman.lengths[s]);
    if (s == esc) {
      w.PutBit(x < 0 ? 1u : 0u);
      w.PutBits(a - v, b.huffman.residual_bits);
    }
  }
  Bitstream fin = Finish(CodecId::kHuffmanEscape, coords, k, w);
  fin.huffman = std::move(b.huffman);
  return fin;
}

std::vector<std::int64_t> huffman_decode(const Bitstream& b, std::size_t count) {
  ExpectCodec(b, CodecId::kHuffmanEscape);
  ExpectCount(b, count);
  const std::uint64_t v = b.huffman.threshold;
  if (v < 1 || v > kMaxThreshold || b.huffman.lengths.size() != 2 * v) {
    Fail(ErrorKind::kFormat, "malformed Huffman table");
  }
  const Canonical c = MakeCanonical(b.huffman.lengths);
  const std::uint32_t esc = static_cast<std::uint32_t>(2 * v - 1);
  BitReader r(b.payload, b.bit_length);
  std::vector<std::int64_t> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const std::uint32_t s = DecodeSymbol(r, c);
    if (s != esc) {
      out.push_back(UnZigZag(s));
      continue;
    }
    const unsigned negative = r.GetBit();
    const std::uint64_t a = v + r.GetBits(b.huffman.residual_bits);
    if (a >= static_cast<std::uint64_t>(kMaxMagnitude)) Fail(ErrorKind::kFormat, "escaped value out of range");
    out.push_back(negative ? -static_cast<std::int64_t>(a) : static_cast<std::int64_t>(a));
  }
  Conclude(b, r, out);
  return out;
}

// ---- pvq-index --------------------------------------------------------------

bool index_codec_feasible(std::size_t n, std::int64_t k) {
  if (n == 0 || k < 1) return false;
  std::uint64_t cells = 0;
  if (__builtin_mul_overflow(static_cast<std::uint64_t>(n), static_cast<std::uint64_t>(k) + 1, &cells)) {
    return false;
  }
  if (cells > kIndexMaxCells) return false;
  // Cheap estimate first; the exact width is only needed near the limit.
  const double estimate = log2_count_points(n, k);
  if (estimate > static_cast<double>(kIndexMaxBits) + 1.0) return false;
  return estimate < static_cast<double>(kIndexMaxBits) - 1.0 || index_bit_width(n, k) <= kIndexMaxBits;
}

namespace {

void RequireIndexFeasible(std::size_t n, std::int64_t k) {
  if (!index_codec_feasible(n, k)) {
    Fail(ErrorKind::kOverflow, "index coding of P(" + std::to_string(n) + ", " + std::to_string(k) +
                                   ") exceeds the size limits; use exp-golomb, rle-zero or "
                                   "huffman-escape instead");
  }
}

}  // namespace

Bitstream index_encode(const PvqPoint& p) {
  RequireIndexFeasible(p.n(), p.k());
  const PointIndex idx = point_to_index(p);
  BitWriter w;
  w.PutBig(idx.value, index_bit_width(p.n(), p.k()));
  return Finish(CodecId::kPvqIndex, p.coords(), static_cast<std::uint64_t>(p.k()), w);
}

PvqPoint index_decode(const Bitstream& b) {
  ExpectCodec(b, CodecId::kPvqIndex);
  if (b.n == 0 || b.k == 0 || b.k > static_cast<std::uint64_t>(kMaxPulses)) {
    Fail(ErrorKind::kFormat, "index bitstream has an invalid (n, k)");
  }
  const auto n = static_cast<std::size_t>(b.n);
  const auto k = static_cast<std::int64_t>(b.k);
  RequireIndexFeasible(n, k);
  const std::size_t width = index_bit_width(n, k);
  if (b.bit_length < width) Fail(ErrorKind::kFormat, "truncated bitstream");
  if (b.bit_length > width) Fail(ErrorKind::kFormat, "trailing bits after the index");
  BitReader r(b.payload, b.bit_length);
  PointIndex idx{r.GetBig(width), n, k};
  try {
    return index_to_point(idx);
  } catch (const Error& e) {
    Fail(ErrorKind::kFormat, e.what());
  }
}

std::vector<std::int64_t> decode(const Bitstream& b) {
  if (b.n > (std::uint64_t{1} << 40)) Fail(ErrorKind::kFormat, "value count out of range");
  const auto count = static_cast<std::size_t>(b.n);
  switch (b.codec) {
    case CodecId::kExpGolomb:
      return golomb_decode(b, count);
    case CodecId::kRleZero:
      return rle_decode(b, count);
    case CodecId::kHuffmanEscape:
      return huffman_decode(b, count);
    case CodecId::kPvqIndex: {
      const PvqPoint p = index_decode(b);
      return {p.coords().begin(), p.coords().end()};
    }
  }
  Fail(ErrorKind::kFormat, "unknown codec");
}

double bits_per_weight(const Bitstream& b, std::size_t n) {
  if (n == 0) return 0.0;
  return static_cast<double>(b.bit_length) / static_cast<double>(n);
}

}  // namespace pvqnet
