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

// Bijection between P(n, k) and the integers [0, count_points(n, k)).
//
// Index order matches for_each_point: the first coordinate runs from +k down
// to -k and the remainder is ranked recursively. Both directions keep a
// single row of the counting recurrence, so memory is O(k) big integers and
// time is O(n * k) big-integer additions.

#ifndef PVQNET_INDEX_HPP_
#define PVQNET_INDEX_HPP_

#include <cstddef>
#include <cstdint>

#include "pvqnet/pvq.hpp"

namespace pvqnet {

struct PointIndex {
  BigInt value;
  std::size_t n = 0;
  std::int64_t k = 0;

  friend bool operator==(const PointIndex&, const PointIndex&) = default;
};

PointIndex point_to_index(const PvqPoint& p);

// Throws Error(kInvalidArgument) if i.value >= count_points(i.n, i.k).
PvqPoint index_to_point(const PointIndex& i);

// ceil(log2(count_points(n, k))): the fixed payload width of an index.
std::size_t index_bit_width(std::size_t n, std::int64_t k);

}  // namespace pvqnet

#endif  // PVQNET_INDEX_HPP_
