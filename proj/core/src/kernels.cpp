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

#include "pvqnet/kernels.hpp"

#include <string>

#include "pvqnet/error.hpp"

namespace pvqnet {

namespace {

void CheckSizes(std::size_t a, std::size_t b, const char* who) {
  if (a != b) {
    Fail(ErrorKind::kShape, std::string(who) + ": dimension mismatch (" + std::to_string(a) +
                                " vs " + std::to_string(b) + ")");
  }
}

[[noreturn]] void Overflow() { Fail(ErrorKind::kOverflow, "dot_addsub: int64 accumulator overflow"); }

}  // namespace

double dot_reference(std::span<const double> w, std::span<const double> x) {
  CheckSizes(w.size(), x.size(), "dot_reference");
  long double acc = 0;
  for (std::size_t i = 0; i < w.size(); ++i) acc += static_cast<long double>(w[i]) * x[i];
  return static_cast<double>(acc);
}

DotResult<std::int64_t> dot_addsub(std::span<const std::int64_t> coeffs,
                                   std::span<const std::int64_t> x, unsigned shift) {
  CheckSizes(coeffs.size(), x.size(), "dot_addsub");
  if (shift > 62) Fail(ErrorKind::kInvalidArgument, "dot_addsub: shift must be <= 62");
  DotResult<std::int64_t> r;
  bool loaded = false;
  std::int64_t acc = 0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::int64_t c = coeffs[i];
    if (c == 0) continue;
    const std::int64_t xi = x[i];
    const bool add = c > 0;
    std::int64_t pulses = add ? c : -c;
    if (!loaded) {
      if (add) {
        acc = xi;
      } else if (__builtin_sub_overflow(std::int64_t{0}, xi, &acc)) {
        Overflow();
      }
      loaded = true;
      --pulses;
    }
    for (; pulses > 0; --pulses) {
      if (add) {
        if (__builtin_add_overflow(acc, xi, &acc)) Overflow();
        ++r.stats.additions;
      } else {
        if (__builtin_sub_overflow(acc, xi, &acc)) Overflow();
        ++r.stats.subtractions;
      }
    }
  }
  r.value = acc >> shift;
  return r;
}

DotResult<double> dot_addsub(std::span<const std::int64_t> coeffs, std::span<const double> x) {
  CheckSizes(coeffs.size(), x.size(), "dot_addsub");
  DotResult<double> r;
  bool loaded = false;
  double acc = 0.0;
  for (std::size_t i = 0; i < coeffs.size(); ++i) {
    const std::int64_t c = coeffs[i];
    if (c == 0) continue;
    const double xi = x[i];
    const bool add = c > 0;
    std::int64_t pulses = add ? c : -c;
    if (!loaded) {
      acc = add ? xi : -xi;
      loaded = true;
      --pulses;
    }
    for (; pulses > 0; --pulses) {
      if (add) {
        acc += xi;
        ++r.stats.additions;
      } else {
        acc -= xi;
        ++r.stats.subtractions;
      }
    }
  }
  r.value = acc;
  return r;
}

DotResult<double> dot_quantized(const QuantizedVector& q, std::span<const double> x) {
  DotResult<double> r = dot_addsub(q.point, x);
  r.value *= q.rho;
  r.stats.multiplications += 1;
  return r;
}

DotResult<double> dot_quantized(const QuantizedVector& q, std::span<const std::int64_t> x) {
  const DotResult<std::int64_t> d = dot_addsub(q.point, x);
  DotResult<double> r;
  r.value = q.rho * static_cast<double>(d.value);
  r.stats = d.stats;
  r.stats.multiplications += 1;
  return r;
}

std::string_view to_string(Arch arch) {
  switch (arch) {
    case Arch::kMultiplier:
      return "multiplier";
    case Arch::kAddSub:
      return "addsub";
    case Arch::kBinaryAccumulate:
      return "binary-accumulate";
    case Arch::kBinaryCounter:
      return "binary-counter";
  }
  return "unknown";
}

std::optional<Arch> parse_arch(std::string_view name) {
  for (Arch a : {Arch::kMultiplier, Arch::kAddSub, Arch::kBinaryAccumulate, Arch::kBinaryCounter}) {
    if (to_string(a) == name) return a;
  }
  return std::nullopt;
}

CycleEstimate estimate_cycles(std::span<const std::int64_t> coeffs, Arch arch) {
  std::uint64_t nnz = 0, pulses = 0;
  for (std::int64_t c : coeffs) {
    if (c == 0) continue;
    ++nnz;
    pulses += static_cast<std::uint64_t>(c < 0 ? -c : c);
  }
  switch (arch) {
    case Arch::kMultiplier:
    case Arch::kBinaryAccumulate:
      return {arch, nnz};
    case Arch::kAddSub:
    case Arch::kBinaryCounter:
      return {arch, pulses};
  }
  Fail(ErrorKind::kInvalidArgument, "estimate_cycles: unknown architecture id " +
                                        std::to_string(static_cast<int>(arch)));
}

}  // namespace pvqnet
