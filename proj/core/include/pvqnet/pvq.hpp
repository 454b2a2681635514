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

// The pyramid lattice P(n, k): integer vectors of dimension n whose absolute
// values sum to exactly k. A real vector y is approximated by a scale rho and
// a lattice point p with y ~= rho * p.

#ifndef PVQNET_PVQ_HPP_
#define PVQNET_PVQ_HPP_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

namespace pvqnet {

using BigInt = boost::multiprecision::cpp_int;

// Largest pulse budget accepted by the encoder. Keeps sum(c_i^2) in int64.
inline constexpr std::int64_t kMaxPulses = std::int64_t{1} << 31;

class PvqPoint {
 public:
  // Throws Error(kInvalidArgument) unless coords is non-empty, k >= 1 and
  // sum(|coords|) == k.
  PvqPoint(std::vector<std::int64_t> coords, std::int64_t k);

  // The conventional point (k, 0, ..., 0).
  static PvqPoint Axis(std::size_t n, std::int64_t k);

  std::span<const std::int64_t> coords() const { return coords_; }
  std::int64_t operator[](std::size_t i) const { return coords_[i]; }
  std::size_t n() const { return coords_.size(); }
  std::int64_t k() const { return k_; }

  std::size_t nnz() const;
  double norm() const;

  friend bool operator==(const PvqPoint&, const PvqPoint&) = default;

 private:
  std::vector<std::int64_t> coords_;
  std::int64_t k_;
};

// rho * point approximates the encoded vector. rho == 0 encodes the null
// vector, in which case point is PvqPoint::Axis(n, k).
struct QuantizedVector {
  PvqPoint point;
  double rho = 0.0;

  std::vector<double> Reconstruct() const;
};

// Number of points of P(n, k), computed exactly with the recurrence
// N(n,k) = N(n-1,k) + N(n-1,k-1) + N(n,k-1). Cost is O(n * k) big-integer
// additions. Throws for n == 0 or k < 0.
BigInt count_points(std::size_t n, std::int64_t k);

// log2 of count_points, evaluated in floating point from the closed form
// sum_i 2^i C(n,i) C(k-1,i-1). Usable at layer scale where the exact count
// is impractical.
double log2_count_points(std::size_t n, std::int64_t k);

// Nearest lattice point in angle: returns the point of P(n, k) maximizing
// p.y / ||p|| together with rho = ||y|| / ||p||. Exact; see pvq.cpp for the
// parametric sweep. Rejects empty or non-finite input and k outside
// [1, kMaxPulses].
QuantizedVector encode(std::span<const double> y, std::int64_t k);

// Enumerates every point of P(n, k) and returns the cosine argmax, ties to
// the lexicographically smallest coordinates. Refuses (n, k) with more than
// kExhaustiveLimit points.
inline constexpr std::uint64_t kExhaustiveLimit = 10'000'000;
PvqPoint exhaustive_nearest(std::span<const double> y, std::int64_t k);

// p.y / (||p|| ||y||). Zero when either side is the zero vector.
double cosine_similarity(std::span<const std::int64_t> p,
                         std::span<const double> y);

// Visits the points of P(n, k) in index order: first coordinate descending
// from +k to -k, recursing on the remainder. fn receives a span that is only
// valid during the call.
template <typename Fn>
void for_each_point(std::size_t n, std::int64_t k, Fn&& fn) {
  std::vector<std::int64_t> c(n, 0);
  auto recurse = [&](auto& self, std::size_t pos, std::int64_t rest) -> void {
    if (pos + 1 == n) {
      c[pos] = rest;
      fn(std::span<const std::int64_t>(c));
      if (rest != 0) {
        c[pos] = -rest;
        fn(std::span<const std::int64_t>(c));
      }
      return;
    }
    for (std::int64_t v = rest; v >= -rest; --v) {
      c[pos] = v;
      self(self, pos + 1, rest - (v < 0 ? -v : v));
    }
    c[pos] = 0;
  };
  if (n > 0) recurse(recurse, 0, k);
}

}  // namespace pvqnet

#endif  // PVQNET_PVQ_HPP_
