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

#include "pvqnet/index.hpp"

#include <string>
#include <vector>

#include "pvqnet/error.hpp"

namespace pvqnet {

namespace {

using Row = std::vector<BigInt>;

// N(m, .) -> N(m + 1, .)
void StepUp(Row& row, Row& scratch) {
  scratch.swap(row);
  row[0] = 1;
  for (std::size_t j = 1; j < row.size(); ++j) row[j] = scratch[j] + scratch[j - 1] + row[j - 1];
}

// N(m, .) -> N(m - 1, .), from N(m-1,j) = N(m,j) - N(m-1,j-1) - N(m,j-1).
void StepDown(Row& row, Row& scratch) {
  scratch.swap(row);
  row[0] = 1;
  for (std::size_t j = 1; j < row.size(); ++j) row[j] = scratch[j] - row[j - 1] - scratch[j - 1];
}

Row BaseRow(std::int64_t k) {
  Row row(static_cast<std::size_t>(k) + 1, 0);
  row[0] = 1;
  return row;
}

std::int64_t Abs(std::int64_t v) { return v < 0 ? -v : v; }

}  // namespace

PointIndex point_to_index(const PvqPoint& p) {
  const std::size_t n = p.n();
  const std::int64_t k = p.k();
  std::vector<std::int64_t> budget(n);
  std::int64_t rest = k;
  for (std::size_t i = 0; i < n; ++i) {
    budget[i] = rest;
    rest -= Abs(p[i]);
  }

  BigInt index = 0;
  Row row = BaseRow(k);  // N(0, .)
  Row scratch(row.size());
  // Coordinate i sees m = n - 1 - i remaining dimensions.
  for (std::size_t step = 0; step < n; ++step) {
    const std::size_t i = n - 1 - step;
    const std::int64_t r = budget[i];
    const std::int64_t v = p[i];
    // Points with the same prefix whose coordinate i exceeds v.
    if (v >= 0) {
      for (std::int64_t t = 0; t <= r - v - 1; ++t) index += row[static_cast<std::size_t>(t)];
    } else {
      for (std::int64_t t = 0; t <= r; ++t) index += row[static_cast<std::size_t>(t)];
      for (std::int64_t t = r + v + 1; t <= r - 1; ++t) index += row[static_cast<std::size_t>(t)];
    }
    if (step + 1 < n) StepUp(row, scratch);
  }
  return PointIndex{std::move(index), n, k};
}

PvqPoint index_to_point(const PointIndex& i) {
  if (i.n == 0) Fail(ErrorKind::kInvalidArgument, "index_to_point: n must be >= 1");
  if (i.k < 1) Fail(ErrorKind::kInvalidArgument, "index_to_point: k must be >= 1");
  if (i.value < 0) Fail(ErrorKind::kInvalidArgument, "index_to_point: negative index");

  Row row = BaseRow(i.k);
  Row scratch(row.size());
  for (std::size_t m = 0; m < i.n; ++m) StepUp(row, scratch);  // N(n, .)
  if (i.value >= row.back()) {
    Fail(ErrorKind::kInvalidArgument, "index_to_point: index " + i.value.str() +
                                          " out of range for P(" + std::to_string(i.n) + "," +
                                          std::to_string(i.k) + ") with " + row.back().str() +
                                          " points");
  }
  StepDown(row, scratch);  // N(n - 1, .)

  std::vector<std::int64_t> coords(i.n, 0);
  BigInt rest_index = i.value;
  std::int64_t rest = i.k;
  for (std::size_t pos = 0; pos < i.n; ++pos) {
    for (std::int64_t u = rest; u >= -rest; --u) {
      const BigInt& block = row[static_cast<std::size_t>(rest - Abs(u))];
      if (rest_index < block) {
        coords[pos] = u;
        rest -= Abs(u);
        break;
      }
      rest_index -= block;
    }
    if (pos + 1 < i.n) StepDown(row, scratch);
  }
  return PvqPoint(std::move(coords), i.k);
}

std::size_t index_bit_width(std::size_t n, std::int64_t k) {
  const BigInt total = count_points(n, k);
  if (total <= 1) return 0;
  return static_cast<std::size_t>(boost::multiprecision::msb(BigInt(total - 1))) + 1;
}

}  // namespace pvqnet
