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

#include "pvqnet/pvq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <string>

#include "pvqnet/error.hpp"

namespace pvqnet {

namespace {

std::int64_t AbsSum(std::span<const std::int64_t> c) {
  std::int64_t s = 0;
  for (std::int64_t v : c) s += v < 0 ? -v : v;
  return s;
}

}  // namespace

PvqPoint::PvqPoint(std::vector<std::int64_t> coords, std::int64_t k)
    : coords_(std::move(coords)), k_(k) {
  if (coords_.empty()) Fail(ErrorKind::kInvalidArgument, "PvqPoint: n must be >= 1");
  if (k_ < 1) Fail(ErrorKind::kInvalidArgument, "PvqPoint: k must be >= 1");
  const std::int64_t l1 = AbsSum(coords_);
  if (l1 != k_) {
    Fail(ErrorKind::kInvalidArgument,
         "PvqPoint: sum of |coords| is " + std::to_string(l1) + ", expected k = " +
             std::to_string(k_));
  }
}

PvqPoint PvqPoint::Axis(std::size_t n, std::int64_t k) {
  if (n == 0) Fail(ErrorKind::kInvalidArgument, "PvqPoint: n must be >= 1");
  std::vector<std::int64_t> c(n, 0);
  c[0] = k;
  return PvqPoint(std::move(c), k);
}

std::size_t PvqPoint::nnz() const {
  return static_cast<std::size_t>(
      std::count_if(coords_.begin(), coords_.end(), [](std::int64_t v) { return v != 0; }));
}

double PvqPoint::norm() const {
  long double q = 0;
  for (std::int64_t v : coords_) q += static_cast<long double>(v) * v;
  return static_cast<double>(std::sqrt(q));
}

std::vector<double> QuantizedVector::Reconstruct() const {
  std::vector<double> out(point.n());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = rho * static_cast<double>(point[i]);
  return out;
}

BigInt count_points(std::size_t n, std::int64_t k) {
  if (n == 0) Fail(ErrorKind::kInvalidArgument, "count_points: n must be >= 1");
  if (k < 0) Fail(ErrorKind::kInvalidArgument, "count_points: k must be >= 0");
  // row[j] holds N(m, j); m = 0 is the empty vector.
  const auto width = static_cast<std::size_t>(k) + 1;
  std::vector<BigInt> row(width, 0);
  row[0] = 1;
  std::vector<BigInt> prev(width);
  for (std::size_t m = 1; m <= n; ++m) {
    prev.swap(row);
    row[0] = 1;
    for (std::size_t j = 1; j < width; ++j) row[j] = prev[j] + prev[j - 1] + row[j - 1];
  }
  return row[width - 1];
}

double log2_count_points(std::size_t n, std::int64_t k) {
  if (n == 0) Fail(ErrorKind::kInvalidArgument, "log2_count_points: n must be >= 1");
  if (k < 0) Fail(ErrorKind::kInvalidArgument, "log2_count_points: k must be >= 0");
  if (k == 0) return 0.0;
  const double dn = static_cast<double>(n);
  const double dk = static_cast<double>(k);
  const std::int64_t top = std::min<std::int64_t>(static_cast<std::int64_t>(n), k);
  // log of 2^i C(n,i) C(k-1,i-1), accumulated with log-sum-exp.
  auto term = [&](double i) {
    return i * std::log(2.0) + std::lgamma(dn + 1) - std::lgamma(i + 1) - std::lgamma(dn - i + 1) +
           std::lgamma(dk) - std::lgamma(i) - std::lgamma(dk - i + 1);
  };
  double peak = -std::numeric_limits<double>::infinity();
  for (std::int64_t i = 1; i <= top; ++i) peak = std::max(peak, term(static_cast<double>(i)));
  double sum = 0.0;
  for (std::int64_t i = 1; i <= top; ++i) sum += std::exp(term(static_cast<double>(i)) - peak);
  return (peak + std::log(sum)) / std::log(2.0);
}

double cosine_similarity(std::span<const std::int64_t> p, std::span<const double> y) {
  if (p.size() != y.size()) Fail(ErrorKind::kShape, "cosine_similarity: dimension mismatch");
  long double dot = 0, pp = 0, yy = 0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dot += static_cast<long double>(p[i]) * y[i];
    pp += static_cast<long double>(p[i]) * p[i];
    yy += static_cast<long double>(y[i]) * y[i];
  }
  if (pp == 0 || yy == 0) return 0.0;
  return static_cast<double>(dot / (std::sqrt(pp) * std::sqrt(yy)));
}

namespace {

// Magnitude search on |y|.
//
// For a multiplier mu > 0 the separable problem max S - mu*Q, with
// S = sum a_i c_i and Q = sum c_i^2, is solved by taking the k largest
// marginal gains a_i - mu(2m + 1). The cosine optimum c* is the unique
// maximizer (in (Q, S)) of that problem for mu = S*/(2Q*), so it is a vertex
// of the upper hull of reachable (Q, S) pairs. The sweep walks those vertices
// from mu = +inf (pulses spread out) towards mu = 0 (pulses stacked on the
// largest magnitude), one pulse move per event, and keeps the best cosine.
//
// Coordinates are grouped by their current pulse count. Within a group the
// next pulse to leave is the smallest magnitude and the next to receive is
// the largest, so an event only has to compare group extremes.
//
// The hull is concave, so once an event with slope mu is passed every later
// vertex satisfies S' <= S + mu (Q' - Q) and S' <= k * max(a). The walk stops
// as soon as that bound cannot beat the best cosine seen.
std::vector<std::int64_t> SweepMagnitudes(std::span<const double> a, std::int64_t k) {
  const std::size_t n = a.size();
  // rank order: ascending magnitude, ties by descending index so the lowest
  // index is the last to lose and the first to gain a pulse.
  std::vector<std::uint32_t> by_rank(n);
  std::iota(by_rank.begin(), by_rank.end(), 0u);
  std::sort(by_rank.begin(), by_rank.end(), [&](std::uint32_t x, std::uint32_t y) {
    if (a[x] != a[y]) return a[x] < a[y];
    return x > y;
  });
  std::vector<double> mag(n);
  for (std::size_t r = 0; r < n; ++r) mag[r] = a[by_rank[r]];

  // Start at mu -> +inf: every coordinate gets k / n pulses, the remainder
  // goes to the largest magnitudes.
  const std::int64_t base = k / static_cast<std::int64_t>(n);
  const std::size_t extra = static_cast<std::size_t>(k % static_cast<std::int64_t>(n));
  std::vector<std::int64_t> count(n, base);  // indexed by rank
  for (std::size_t r = n - extra; r < n; ++r) ++count[r];

  std::map<std::int64_t, std::set<std::uint32_t>> groups;
  long double s = 0;
  std::int64_t q = 0;
  for (std::uint32_t r = 0; r < n; ++r) {
    groups[count[r]].insert(r);
    s += static_cast<long double>(mag[r]) * count[r];
    q += count[r] * count[r];
  }
  const std::vector<std::int64_t> initial = count;

  struct Move {
    std::uint32_t from, to;
  };
  std::vector<Move> moves;
  std::size_t best_moves = 0;
  long double best_s = s;
  std::int64_t best_q = q;
  const long double cap = static_cast<long double>(k) * mag[n - 1];
  const long double q_max = static_cast<long double>(k) * k;

  for (;;) {
    double best_event = std::numeric_limits<double>::infinity();
    std::int64_t from_group = 0, to_group = 0;
    for (auto g = groups.begin(); g != groups.end(); ++g) {
      if (g->first == 0) continue;
      const double ai = mag[*g->second.begin()];
      for (auto h = g; h != groups.end(); ++h) {
        const double aj = mag[*h->second.rbegin()];
        if (!(aj > ai)) continue;
        const double event = 2.0 * static_cast<double>(h->first - g->first + 1) / (aj - ai);
        if (event < best_event) {
          best_event = event;
          from_group = g->first;
          to_group = h->first;
        }
      }
    }
    if (!std::isfinite(best_event)) break;

    auto& src = groups[from_group];
    const std::uint32_t i = *src.begin();
    src.erase(src.begin());
    if (src.empty()) groups.erase(from_group);
    auto& dst = groups[to_group];
    const std::uint32_t j = *std::prev(dst.end());
    dst.erase(std::prev(dst.end()));
    if (dst.empty()) groups.erase(to_group);
    groups[from_group - 1].insert(i);
    groups[to_group + 1].insert(j);
    --count[i];
    ++count[j];
    moves.push_back({i, j});
    s += static_cast<long double>(mag[j]) - mag[i];
    q += 2 * (to_group - from_group + 1);

    if (s * s * best_q > best_s * best_s * q) {
      best_s = s;
      best_q = q;
      best_moves = moves.size();
    }

    const long double mu = 1.0L / best_event;
    auto bound = [&](long double qq) {
      return std::min(s + mu * (qq - q), cap) / std::sqrt(qq);
    };
    const long double q_end = std::min(q_max, q + (cap - s) / mu);
    const long double limit = std::max(bound(static_cast<long double>(q)), bound(q_end));
    if (limit * limit * best_q <= best_s * best_s) break;
  }

  std::vector<std::int64_t> result = initial;
  for (std::size_t m = 0; m < best_moves; ++m) {
    --result[moves[m].from];
    ++result[moves[m].to];
  }
  std::vector<std::int64_t> out(n);
  for (std::size_t r = 0; r < n; ++r) out[by_rank[r]] = result[r];
  return out;
}

}  // namespace

QuantizedVector encode(std::span<const double> y, std::int64_t k) {
  if (y.empty()) Fail(ErrorKind::kInvalidArgument, "encode: empty vector");
  if (k < 1 || k > kMaxPulses) {
    Fail(ErrorKind::kInvalidArgument, "encode: k out of range: " + std::to_string(k));
  }
  long double norm2 = 0;
  std::vector<double> a(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y[i])) {
      Fail(ErrorKind::kInvalidArgument, "encode: non-finite component at " + std::to_string(i));
    }
    a[i] = std::fabs(y[i]);
    norm2 += static_cast<long double>(y[i]) * y[i];
  }
  if (norm2 == 0) return QuantizedVector{PvqPoint::Axis(y.size(), k), 0.0};

  std::vector<std::int64_t> c = SweepMagnitudes(a, k);
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (y[i] < 0) c[i] = -c[i];
  }
  PvqPoint point(std::move(c), k);
  long double pp = 0;
  for (std::int64_t v : point.coords()) pp += static_cast<long double>(v) * v;
  const double rho = static_cast<double>(std::sqrt(norm2) / std::sqrt(pp));
  return QuantizedVector{std::move(point), rho};
}

PvqPoint exhaustive_nearest(std::span<const double> y, std::int64_t k) {
  if (y.empty()) Fail(ErrorKind::kInvalidArgument, "exhaustive_nearest: empty vector");
  if (k < 1) Fail(ErrorKind::kInvalidArgument, "exhaustive_nearest: k must be >= 1");
  const BigInt total = count_points(y.size(), k);
  if (total > kExhaustiveLimit) {
    Fail(ErrorKind::kInvalidArgument, "exhaustive_nearest: P(" + std::to_string(y.size()) + "," +
                                          std::to_string(k) + ") has " + total.str() +
                                          " points, limit is " + std::to_string(kExhaustiveLimit));
  }
  std::vector<std::int64_t> best;
  long double best_score = -std::numeric_limits<long double>::infinity();
  for_each_point(y.size(), k, [&](std::span<const std::int64_t> p) {
    long double dot = 0, pp = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      dot += static_cast<long double>(p[i]) * y[i];
      pp += static_cast<long double>(p[i]) * p[i];
    }
    const long double score = dot / std::sqrt(pp);
    if (score > best_score ||
        (score == best_score && std::lexicographical_compare(p.begin(), p.end(), best.begin(),
                                                             best.end()))) {
      best_score = score;
      best.assign(p.begin(), p.end());
    }
  });
  return PvqPoint(std::move(best), k);
}

}  // namespace pvqnet
