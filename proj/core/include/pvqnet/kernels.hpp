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

#ifndef PVQNET_KERNELS_HPP_
#define PVQNET_KERNELS_HPP_

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

#include "pvqnet/pvq.hpp"

namespace pvqnet {

// Arithmetic performed by a kernel. Loading the first operand into the
// accumulator is free, so a dot product with p pulses costs p - 1 add/subs.
struct DotStats {
  std::uint64_t additions = 0;
  std::uint64_t subtractions = 0;
  std::uint64_t multiplications = 0;

  std::uint64_t addsub() const { return additions + subtractions; }

  DotStats& operator+=(const DotStats& o) {
    additions += o.additions;
    subtractions += o.subtractions;
    multiplications += o.multiplications;
    return *this;
  }
};

template <typename T>
struct DotResult {
  T value{};
  DotStats stats;
};

// Plain sum of w_i x_i accumulated in long double.
double dot_reference(std::span<const double> w, std::span<const double> x);

// Multiplication-free dot product of integer coefficients with x: x_i is
// added c_i times when c_i > 0 and subtracted |c_i| times when c_i < 0, zero
// coefficients are skipped. Integer inputs accumulate in int64 and throw
// Error(kOverflow) on wrap-around.
//
// An optional downshift divides the integer result by 2^shift (arithmetic
// shift, rounding toward -inf).
DotResult<std::int64_t> dot_addsub(std::span<const std::int64_t> coeffs,
                                   std::span<const std::int64_t> x, unsigned shift = 0);
DotResult<double> dot_addsub(std::span<const std::int64_t> coeffs, std::span<const double> x);

inline DotResult<std::int64_t> dot_addsub(const PvqPoint& p, std::span<const std::int64_t> x,
                                          unsigned shift = 0) {
  return dot_addsub(p.coords(), x, shift);
}
inline DotResult<double> dot_addsub(const PvqPoint& p, std::span<const double> x) {
  return dot_addsub(p.coords(), x);
}

// rho * dot_addsub(q.point, x): the only multiplication is by rho.
DotResult<double> dot_quantized(const QuantizedVector& q, std::span<const double> x);
DotResult<double> dot_quantized(const QuantizedVector& q, std::span<const std::int64_t> x);

// Serial datapaths for one dot product.
//   kMultiplier        multiply-accumulate over non-zero weights
//   kAddSub            one add/sub of x_i per pulse
//   kBinaryAccumulate  binary inputs, weight accumulated with x_i's sign
//   kBinaryCounter     binary inputs, up/down counter stepped once per pulse
enum class Arch { kMultiplier, kAddSub, kBinaryAccumulate, kBinaryCounter };

std::string_view to_string(Arch arch);
std::optional<Arch> parse_arch(std::string_view name);

struct CycleEstimate {
  Arch arch = Arch::kAddSub;
  std::uint64_t cycles = 0;
};

// Cycle count for a dot product with these coefficients. Multiplier and
// binary-accumulate take one cycle per non-zero weight; add/sub and the
// binary counter take one cycle per pulse.
CycleEstimate estimate_cycles(std::span<const std::int64_t> coeffs, Arch arch);
inline CycleEstimate estimate_cycles(const PvqPoint& p, Arch arch) {
  return estimate_cycles(p.coords(), arch);
}

}  // namespace pvqnet

#endif  // PVQNET_KERNELS_HPP_
