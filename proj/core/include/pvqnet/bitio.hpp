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

#ifndef PVQNET_BITIO_HPP_
#define PVQNET_BITIO_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "pvqnet/error.hpp"
#include "pvqnet/pvq.hpp"

namespace pvqnet {

// MSB-first bit writer. Multi-bit fields are written big-endian.
class BitWriter {
 public:
  void PutBit(unsigned bit) {
    if ((bits_ & 7) == 0) bytes_.push_back(0);
    if (bit) bytes_.back() |= static_cast<std::uint8_t>(0x80u >> (bits_ & 7));
    ++bits_;
  }

  void PutBits(std::uint64_t value, unsigned count) {
    for (unsigned i = count; i-- > 0;) PutBit(static_cast<unsigned>((value >> i) & 1u));
  }

  void PutBig(const BigInt& value, std::size_t count) {
    for (std::size_t i = count; i-- > 0;) PutBit(boost::multiprecision::bit_test(value, i) ? 1u : 0u);
  }

  // Order-0 exponential Golomb: floor(log2(u+1)) zeros, then u+1 in binary.
  void PutExpGolomb(std::uint64_t u) {
    if (u >= (std::uint64_t{1} << 63)) Fail(ErrorKind::kInvalidArgument, "exp-Golomb value too large");
    const std::uint64_t v = u + 1;
    const unsigned width = static_cast<unsigned>(64 - __builtin_clzll(v));
    PutBits(0, width - 1);
    PutBits(v, width);
  }

  std::uint64_t bit_length() const { return bits_; }
  const std::vector<std::uint8_t>& bytes() const { return bytes_; }
  std::vector<std::uint8_t> Take() { return std::move(bytes_); }

 private:
  std::vector<std::uint8_t> bytes_;
  std::uint64_t bits_ = 0;
};

class BitReader {
 public:
  BitReader(std::span<const std::uint8_t> bytes, std::uint64_t bit_length)
      : bytes_(bytes), limit_(bit_length) {
    if (bit_length > static_cast<std::uint64_t>(bytes.size()) * 8) {
      Fail(ErrorKind::kFormat, "bit length exceeds the payload");
    }
  }

  unsigned GetBit() {
    if (pos_ >= limit_) Fail(ErrorKind::kFormat, "truncated bitstream");
    const unsigned bit = (bytes_[pos_ >> 3] >> (7 - (pos_ & 7))) & 1u;
    ++pos_;
    return bit;
  }

  std::uint64_t GetBits(unsigned count) {
    std::uint64_t v = 0;
    for (unsigned i = 0; i < count; ++i) v = (v << 1) | GetBit();
    return v;
  }

  BigInt GetBig(std::size_t count) {
    BigInt v = 0;
    for (std::size_t i = 0; i < count; ++i) {
      v <<= 1;
      if (GetBit()) v |= 1;
    }
    return v;
  }

  std::uint64_t GetExpGolomb() {
    unsigned zeros = 0;
    while (GetBit() == 0) {
      if (++zeros > 62) Fail(ErrorKind::kFormat, "exp-Golomb prefix too long");
    }
    const std::uint64_t v = (std::uint64_t{1} << zeros) | GetBits(zeros);
    return v - 1;
  }

  std::uint64_t position() const { return pos_; }
  std::uint64_t remaining() const { return limit_ - pos_; }

 private:
  std::span<const std::uint8_t> bytes_;
  std::uint64_t limit_;
  std::uint64_t pos_ = 0;
};

// 0 -> 0, +v -> 2v - 1, -v -> 2v.
inline std::uint64_t ZigZag(std::int64_t v) {
  return v > 0 ? 2 * static_cast<std::uint64_t>(v) - 1 : 2 * (0 - static_cast<std::uint64_t>(v));
}

inline std::int64_t UnZigZag(std::uint64_t u) {
  return (u & 1) ? static_cast<std::int64_t>((u + 1) / 2) : -static_cast<std::int64_t>(u / 2);
}

// 2 * floor(log2(u + 1)) + 1
inline unsigned ExpGolombLength(std::uint64_t u) {
  return 2 * static_cast<unsigned>(63 - __builtin_clzll(u + 1)) + 1;
}

}  // namespace pvqnet

#endif  // PVQNET_BITIO_HPP_
