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

// Acceptance runner: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <functional>
#include <iostream>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pvqnet/codec.hpp"
#include "pvqnet/error.hpp"
#include "pvqnet/idx.hpp"
#include "pvqnet/index.hpp"
#include "pvqnet/inference.hpp"
#include "pvqnet/kernels.hpp"
#include "pvqnet/model_file.hpp"
#include "pvqnet/pvq.hpp"
#include "pvqnet/quantizer.hpp"
#include "test_util.hpp"

namespace pvqnet {
namespace {

using Clock = std::chrono::steady_clock;

// Collects the first failure of a criterion and a short detail string.
class Check {
 public:
  void Expect(bool ok, const std::string& what) {
    if (!ok && !failure_) failure_ = what;
  }
  void Note(const std::string& s) { detail_ << (detail_.tellp() > 0 ? " " : "") << s; }
  bool ok() const { return !failure_; }
  std::string Summary() const { return failure_ ? *failure_ + "; " + detail_.str() : detail_.str(); }

 private:
  std::optional<std::string> failure_;
  std::ostringstream detail_;
};

double Seconds(Clock::time_point since) {
  return std::chrono::duration<double>(Clock::now() - since).count();
}

std::string Fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(digits);
  os << v;
  return os.str();
}

std::string Sci(double v) {
  std::ostringstream os;
  os.setf(std::ios::scientific);
  os.precision(2);
  os << v;
  return os.str();
}

// ---- independent oracles --------------------------------------------------------

// Counts P(n, k) by depth-first generation of every vector.
std::uint64_t BruteCount(std::size_t n, std::int64_t k) {
  std::function<std::uint64_t(std::size_t, std::int64_t)> rec = [&](std::size_t pos, std::int64_t rest) {
    if (pos == n) return std::uint64_t{rest == 0};
    std::uint64_t c = 0;
    for (std::int64_t v = -rest; v <= rest; ++v) c += rec(pos + 1, rest - std::llabs(v));
    return c;
  };
  return rec(0, k);
}

std::size_t CeilLog2(const BigInt& v) {
  std::size_t b = 0;
  while ((BigInt(1) << b) < v) ++b;
  return b;
}

std::int64_t NaiveDot(std::span<const std::int64_t> w, std::span<const std::int64_t> x) {
  std::int64_t s = 0;
  for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
  return s;
}

std::uint64_t Pulses(std::span<const std::int64_t> v) {
  std::uint64_t p = 0;
  for (std::int64_t c : v) p += static_cast<std::uint64_t>(std::llabs(c));
  return p;
}

// Layer of the given bucket counts: 0, +-1, +-2..3, +-4..7, +-8..15.
std::vector<std::int64_t> FromBuckets(std::uint64_t zeros, std::uint64_t ones, std::uint64_t twos,
                                      std::uint64_t fours, std::uint64_t others) {
  std::vector<std::int64_t> v(zeros, 0);
  auto fill = [&](std::uint64_t count, std::int64_t lo, std::int64_t hi) {
    for (std::uint64_t i = 0; i < count; ++i) {
      const std::int64_t mag = lo + static_cast<std::int64_t>(i % static_cast<std::uint64_t>(hi - lo + 1));
      v.push_back(i % 2 ? -mag : mag);
    }
  };
  fill(ones, 1, 1);
  fill(twos, 2, 3);
  fill(fours, 4, 7);
  fill(others, 8, 15);
  std::mt19937_64 rng(1);
  std::shuffle(v.begin(), v.end(), rng);
  return v;
}

RealTensor ToReal(const IntTensor& x) {
  RealTensor r(x.shape());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = static_cast<double>(x[i]);
  return r;
}

QuantConfig AllLayers(const char* ratio, BiasMode mode = BiasMode::kJoint) {
  QuantConfig cfg;
  cfg.default_fc = Ratio::Parse(ratio);
  cfg.default_conv = cfg.default_fc;
  cfg.bias_mode = mode;
  return cfg;
}

// The shipped MNIST fixture, quantized once with the ratio-5 preset.
struct Fixture {
  Network float_net;
  Network pvq_net;
  std::vector<LayerReport> report;
  double quantize_seconds = 0.0;
};

const Fixture& MnistFixture() {
  static const Fixture f = [] {
    Fixture r;
    r.float_net = read_model(testing::DataDir() / "mnist_mlp.pvqnet");
    const auto t0 = Clock::now();
    QuantizeResult q = quantize_network(r.float_net, QuantConfig::Preset("mnist-a"));
    r.quantize_seconds = Seconds(t0);
    r.pvq_net = std::move(q.network);
    r.report = std::move(q.report);
    return r;
  }();
  return f;
}

// ---- criteria -------------------------------------------------------------------

Check LatticeCount() {
  Check c;
  const auto t0 = Clock::now();
  c.Expect(count_points(8, 4) == 2816, "count_points(8,4) != 2816");
  std::size_t cases = 0;
  for (std::size_t n = 1; n <= 10; ++n) {
    for (std::int64_t k = 0; k <= 6; ++k) {
      const std::uint64_t brute = BruteCount(n, k);
      c.Expect(count_points(n, k) == brute,
               "count mismatch at n=" + std::to_string(n) + " k=" + std::to_string(k));
      if (k >= 1) {
        std::uint64_t visited = 0;
        bool valid = true;
        for_each_point(n, k, [&](std::span<const std::int64_t> p) {
          ++visited;
          valid = valid && Pulses(p) == static_cast<std::uint64_t>(k);
        });
        c.Expect(valid && visited == brute,
                 "enumeration mismatch at n=" + std::to_string(n) + " k=" + std::to_string(k));
      }
      ++cases;
    }
  }
  const double s = Seconds(t0);
  c.Expect(s < 10.0, "runtime " + Fmt(s, 2) + " s over 10 s");
  c.Note("count(8,4)=" + count_points(8, 4).str() + " cases=" + std::to_string(cases) + " time=" + Fmt(s, 2) + "s");
  return c;
}

Check EncoderOptimality() {
  Check c;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(20240);
  std::uniform_int_distribution<std::size_t> nd(1, 6);
  std::uniform_int_distribution<std::int64_t> kd(1, 5);
  std::size_t mismatches = 0;
  double worst = 0.0;
  for (int t = 0; t < 10000; ++t) {
    const std::size_t n = nd(rng);
    const std::int64_t k = kd(rng);
    auto y = testing::Gaussian(rng, n);
    if (t % 4 == 0) {
      for (double& v : y) v = std::round(v * 2.0) / 2.0;  // provokes ties
    }
    if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) y[0] = 1.0;
    const PvqPoint fast = encode(y, k).point;
    const PvqPoint slow = exhaustive_nearest(y, k);
    const double cf = cosine_similarity(fast.coords(), y);
    const double cs = cosine_similarity(slow.coords(), y);
    const double rel = std::fabs(cf - cs) / std::fabs(cs);
    worst = std::max(worst, rel);
    c.Expect(rel <= 1e-12, "cosine gap " + Sci(rel) + " at trial " + std::to_string(t));
    if (!(fast == slow)) ++mismatches;  // a tie by the check above
  }
  const double s = Seconds(t0);
  c.Expect(s < 60.0, "runtime " + Fmt(s, 2) + " s over 60 s");
  c.Note("vectors=10000 tie_mismatches=" + std::to_string(mismatches) + " max_rel_gap=" +
         Sci(worst) + " time=" + Fmt(s, 2) + "s");
  return c;
}

Check IndexBijection() {
  Check c;
  const auto t0 = Clock::now();
  std::uint64_t points = 0;
  for (std::size_t n = 1; n <= 10; ++n) {
    for (std::int64_t k = 1; k <= 6; ++k) {
      const BigInt total = count_points(n, k);
      c.Expect(index_bit_width(n, k) == CeilLog2(total),
               "width mismatch at n=" + std::to_string(n) + " k=" + std::to_string(k));
      BigInt expected = 0;
      bool ok = true;
      for_each_point(n, k, [&](std::span<const std::int64_t> coords) {
        if (!ok) return;
        const PvqPoint p(std::vector<std::int64_t>(coords.begin(), coords.end()), k);
        const PointIndex i = point_to_index(p);
        ok = i.value == expected && i.n == n && i.k == k && index_to_point(i) == p;
        ++expected;
        ++points;
      });
      c.Expect(ok && expected == total,
               "round trip failed at n=" + std::to_string(n) + " k=" + std::to_string(k));
    }
  }
  const double s = Seconds(t0);
  c.Expect(s < 60.0, "runtime " + Fmt(s, 2) + " s over 60 s");
  c.Note("points=" + std::to_string(points) + " time=" + Fmt(s, 2) + "s");
  return c;
}

Check MultiplicationFree() {
  Check c;
  std::uint64_t dots = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    std::mt19937_64 rng(seed);
    const char* ratio = seed % 3 == 0 ? "1/2" : seed % 3 == 1 ? "2" : "5";
    const Network q = quantize_network(testing::RandomMlp(rng, {48, 32, 24, 10}), AllLayers(ratio)).network;
    const RealTensor x = ToReal(IntTensor({48}, testing::RandomPixels(rng, 48)));
    const auto out = forward_pvq(q, x);
    c.Expect(out.stats.multiplications == 0, "multiplications reported, seed " + std::to_string(seed));

    // Replays every dot product of the pass on its own.
    std::uint64_t expected = 0;
    RealTensor cur = x;
    for (const Layer& l : q.layers) {
      if (!l.is_quantized()) continue;
      const QuantizedParams& p = l.quantized_params();
      const std::size_t rows = p.biases.size();
      const std::size_t width = p.weights.size() / rows;
      for (std::size_t r = 0; r < rows; ++r) {
        const auto row = p.weights.data().subspan(r * width, width);
        const std::uint64_t pulses = Pulses(row);
        const std::uint64_t ops = dot_addsub(row, cur.data()).stats.addsub() + (p.biases[r] != 0 && pulses ? 1 : 0);
        // k - 1 add/subs for the row's k pulses, plus the bias addition.
        c.Expect(ops <= (pulses ? pulses - 1 : 0) + 1, "dot over budget in " + l.name);
        expected += ops;
        ++dots;
      }
      // Next input: the unscaled pvq activations of this layer.
      RealTensor next({rows});
      const double ratio_b = p.bias_scale;
      double in_scale = 1.0;
      for (const Layer& m : q.layers) {
        if (&m == &l) break;
        if (m.is_quantized()) in_scale *= m.quantized_params().rho;
      }
      for (std::size_t r = 0; r < rows; ++r) {
        double v = dot_addsub(p.weights.data().subspan(r * width, width), cur.data()).value;
        v += static_cast<double>(p.biases[r]) * ratio_b / in_scale;
        next[r] = l.activation == Activation::kRelu ? std::max(v, 0.0) : v;
      }
      cur = next;
    }
    c.Expect(out.stats.addsub() == expected, "pass add/sub count " + std::to_string(out.stats.addsub()) +
                                                 " != " + std::to_string(expected));
    for (std::size_t i = 0; i < cur.size(); ++i) {
      c.Expect(std::fabs(cur[i] - out.logits[i]) <= 1e-9 * std::max(1.0, std::fabs(cur[i])),
               "replayed logits differ");
    }
  }
  c.Note("seeds=25 dots=" + std::to_string(dots) + " multiplications=0");
  return c;
}

Check ScalePropagation() {
  Check c;
  std::mt19937_64 rng(555);
  const Network mlp = testing::RandomMlp(rng, {64, 40, 24, 10});
  const Network conv = testing::RandomConvNet(rng);
  double worst = 0.0;
  std::size_t inputs = 0;
  for (const BiasMode mode : {BiasMode::kJoint, BiasMode::kInteger}) {
    for (const Network* net : {&mlp, &conv}) {
      const Network q = quantize_network(*net, AllLayers("2", mode)).network;
      const Network dq = Dequantize(q);
      const std::size_t in = ShapeSize(q.input_shape());
      for (int t = 0; t < 250; ++t, ++inputs) {
        const RealTensor x = ToReal(IntTensor(q.input_shape(), testing::RandomPixels(rng, in)));
        const RealTensor f = forward_float(dq, x);
        const auto p = forward_pvq(q, x);
        double scale = 0.0, err = 0.0;
        for (std::size_t i = 0; i < f.size(); ++i) {
          scale = std::max(scale, std::fabs(f[i]));
          err = std::max(err, std::fabs(p.rho_total * p.logits[i] - f[i]));
        }
        const double rel = scale > 0 ? err / scale : err;
        worst = std::max(worst, rel);
        c.Expect(rel <= 1e-9, "logits differ by " + Sci(rel) + " relative");
        c.Expect(argmax(p.logits.data()) == argmax(f.data()), "argmax differs");
        c.Expect(p.stats.multiplications == 0, "multiplications on the pvq path");
      }
    }
  }
  c.Note("inputs=" + std::to_string(inputs) + " max_rel_err=" + Sci(worst));
  return c;
}

Check BinaryIdentities() {
  Check c;
  c.Expect(bsign(0) == 1 && bsign(0.0) == 1 && bsign(-1) == -1 && bsign(-0.0) == 1, "bsign(0) != +1");
  std::uint64_t windows = 0;
  for (std::size_t p = 1; p <= 4; ++p) {
    const std::size_t cells = p * p;
    for (std::uint32_t mask = 0; mask < (1u << cells); ++mask) {
      std::vector<std::uint8_t> bits(cells);
      std::vector<std::int64_t> vals(cells);
      for (std::size_t i = 0; i < cells; ++i) {
        bits[i] = (mask >> i) & 1;
        vals[i] = bits[i] ? -1 : 1;
      }
      const std::int64_t mx = *std::max_element(vals.begin(), vals.end());
      c.Expect((binary_max_bits(bits) ? -1 : 1) == mx, "AND differs from max");
      const IntTensor pooled = maxpool(IntTensor({1, p, p}, vals), p, p);
      c.Expect(pooled.size() == 1 && pooled[0] == mx, "maxpool differs from max");
      ++windows;
    }
  }
  // Every arrangement and sign pattern of the magnitudes {2, 2, 2, 1} in P(7,7)
  // against every +/-1 input.
  std::uint64_t dots = 0;
  std::vector<std::int64_t> mags{0, 0, 0, 1, 2, 2, 2};
  do {
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < 7; ++i) {
      if (mags[i] != 0) support.push_back(i);
    }
    for (unsigned signs = 0; signs < (1u << support.size()); ++signs) {
      std::vector<std::int64_t> w = mags;
      for (std::size_t j = 0; j < support.size(); ++j) {
        if ((signs >> j) & 1) w[support[j]] = -w[support[j]];
      }
      const PvqPoint p(w, 7);
      for (unsigned in = 0; in < 128; ++in) {
        std::vector<std::int64_t> x(7);
        for (unsigned i = 0; i < 7; ++i) x[i] = (in >> i) & 1 ? -1 : 1;
        const auto r = dot_addsub(p, x);
        c.Expect(r.stats.addsub() == 6, "P(7,7) dot did not cost 6 add/subs");
        c.Expect(r.stats.multiplications == 0, "multiplication in binary dot");
        c.Expect(bsign(r.value) == bsign(NaiveDot(w, x)), "sign differs from naive dot");
        ++dots;
      }
    }
  } while (std::next_permutation(mags.begin(), mags.end()));
  const PvqPoint example({-2, 1, 0, 0, 2, 2, 0}, 7);
  c.Expect(dot_addsub(example, std::vector<std::int64_t>{1, 1, 1, 1, 1, 1, 1}).stats.addsub() == 6,
           "worked example cost");
  c.Note("windows=" + std::to_string(windows) + " p77_dots=" + std::to_string(dots) + " ops_per_dot=6");
  return c;
}

Check CompressionNumbers() {
  Check c;
  const auto fc0 = FromBuckets(326314, 71184, 4401, 21, 0);
  const auto conv1 = FromBuckets(3342, 3774, 1854, 272, 6);
  const double b_fc0 = bits_per_weight(golomb_encode(fc0), fc0.size());
  const double b_conv1 = bits_per_weight(golomb_encode(conv1), conv1.size());
  c.Expect(std::fabs(b_fc0 - 1.40) <= 0.01, "FC0 buckets give " + Fmt(b_fc0) + " bits/weight");
  c.Expect(std::fabs(b_conv1 - 2.8) <= 0.1, "CONV1 buckets give " + Fmt(b_conv1) + " bits/weight");
  c.Expect(golomb_decode(golomb_encode(fc0), fc0.size()) == fc0, "FC0 golomb round trip");
  c.Note("fc0=" + Fmt(b_fc0) + " conv1=" + Fmt(b_conv1));

  // Golden codec fixtures decode and re-encode bit-exactly.
  std::size_t goldens = 0;
  for (const char* name : {"exp_golomb.bin", "rle_zero.bin", "huffman_escape.bin", "pvq_index.bin"}) {
    const auto bytes = read_file(testing::GoldenDir() / name);
    const Bitstream b = Bitstream::Parse(bytes);
    const auto v = decode(b);
    Bitstream again;
    switch (b.codec) {
      case CodecId::kExpGolomb: again = golomb_encode(v); break;
      case CodecId::kRleZero: again = rle_encode(v); break;
      case CodecId::kHuffmanEscape: again = huffman_encode(v, b.huffman.threshold); break;
      case CodecId::kPvqIndex: again = index_encode(PvqPoint(v, static_cast<std::int64_t>(b.k))); break;
    }
    c.Expect(again.Serialize() == bytes, std::string("golden ") + name + " not reproduced");
    ++goldens;
  }

  // Model fixtures: every codec on a quantized conv net, and the MNIST
  // fixture on every codec whose limits admit its layers.
  std::mt19937_64 rng(71);
  const Network small = quantize_network(testing::RandomConvNet(rng), AllLayers("1")).network;
  const Fixture& f = MnistFixture();
  std::size_t round_trips = 0;
  std::size_t refused = 0;
  for (const CodecId id : {CodecId::kExpGolomb, CodecId::kRleZero, CodecId::kHuffmanEscape, CodecId::kPvqIndex}) {
    for (const Network* net : {&small, &f.pvq_net}) {
      bool feasible = true;
      if (id == CodecId::kPvqIndex) {
        for (const Layer& l : net->layers) {
          if (l.is_quantized()) feasible = feasible && index_codec_feasible(l.parameter_count(), l.quantized_params().k);
        }
      }
      try {
        const CompressedModel cm = compress_model(*net, {id, 8});
        c.Expect(serialize_model(decompress_model(cm.bytes)) == serialize_model(*net),
                 std::string(to_string(id)) + " round trip differs");
        ++round_trips;
      } catch (const Error& e) {
        // Only the documented size refusal of the index codec is acceptable.
        c.Expect(!feasible && e.kind() == ErrorKind::kOverflow, std::string(to_string(id)) + ": " + e.what());
        ++refused;
      }
    }
  }
  c.Note("goldens=" + std::to_string(goldens) + " model_round_trips=" + std::to_string(round_trips) +
         " index_refused_over_limits=" + std::to_string(refused));
  return c;
}

Check CycleModel() {
  Check c;
  std::mt19937_64 rng(808);
  std::uniform_int_distribution<std::size_t> nd(1, 64);
  std::uniform_int_distribution<std::int64_t> kd(1, 200);
  for (int t = 0; t < 2000; ++t) {
    const std::size_t n = nd(rng);
    const std::int64_t k = kd(rng);
    // Points of varied support: spread, concentrated and encoder output.
    std::vector<std::int64_t> v(n, 0);
    if (t % 3 == 0) {
      v[0] = k;
    } else if (t % 3 == 1) {
      std::uniform_int_distribution<std::size_t> pos(0, n - 1);
      for (std::int64_t i = 0; i < k; ++i) v[pos(rng)] += (t & 4) ? -1 : 1;
    } else {
      const auto y = testing::Gaussian(rng, n);
      const QuantizedVector q = encode(y, k);
      v.assign(q.point.coords().begin(), q.point.coords().end());
    }
    const PvqPoint p(v, k);
    const auto add = estimate_cycles(p, Arch::kAddSub).cycles;
    const auto mul = estimate_cycles(p, Arch::kMultiplier).cycles;
    c.Expect(add == static_cast<std::uint64_t>(k), "addsub cycles != k");
    c.Expect(mul == p.nnz(), "multiplier cycles != nnz");
    c.Expect(mul <= add, "multiplier above addsub");
  }
  c.Note("points=2000 addsub=k multiplier=nnz");
  return c;
}

Check EndToEndAccuracy() {
  Check c;
  const auto t0 = Clock::now();
  const LabeledSamples data = read_idx_dataset(testing::DataDir() / "mnist-heldout-images-idx3-ubyte",
                                               testing::DataDir() / "mnist-heldout-labels-idx1-ubyte");
  const unsigned threads = std::max(1u, std::thread::hardware_concurrency());
  const Fixture& f = MnistFixture();
  const Evaluation fl = evaluate(f.float_net, data, InferencePath::kFloat, threads);
  const Evaluation pv = evaluate(f.pvq_net, data, InferencePath::kPvq, threads);
  const double drop = 100.0 * (fl.accuracy - pv.accuracy);
  const double s = Seconds(t0) + f.quantize_seconds;
  c.Expect(fl.accuracy >= 0.97, "float accuracy below 97%");
  c.Expect(drop <= 5.0, "drop of " + Fmt(drop, 2) + " points");
  c.Expect(pv.stats.multiplications == 0, "multiplications on the pvq path");
  c.Expect(s < 300.0, "runtime " + Fmt(s, 1) + " s over 300 s");
  c.Note("samples=" + std::to_string(data.size()) + " float=" + Fmt(100.0 * fl.accuracy, 2) +
         "% pvq=" + Fmt(100.0 * pv.accuracy, 2) + "% drop=" + Fmt(drop, 2) + " time=" + Fmt(s, 1) + "s");
  return c;
}

Check Sparsity() {
  Check c;
  std::ostringstream zeros;
  for (const LayerReport& l : MnistFixture().report) {
    const double z = 1.0 - static_cast<double>(l.nnz) / static_cast<double>(l.n);
    c.Expect(5 * (l.n - l.nnz) >= 4 * l.n, l.name + " has " + Fmt(100.0 * z, 2) + "% zeros");
    zeros << " " << l.name << "=" << Fmt(100.0 * z, 2) << "%";
  }
  // Random layer sizes. Every layer has N >= 6: with fewer than five
  // coordinates a single pulse already exceeds one fifth.
  std::mt19937_64 rng(90);
  std::uniform_int_distribution<std::size_t> in_d(2, 300);
  std::uniform_int_distribution<std::size_t> out_d(2, 40);
  std::size_t layers = 0;
  for (int t = 0; t < 40; ++t) {
    const QuantizeResult q = quantize_network(testing::RandomMlp(rng, {in_d(rng), out_d(rng)}), AllLayers("5"));
    for (const LayerReport& l : q.report) {
      c.Expect(5 * (l.n - l.nnz) >= 4 * l.n, "random layer of N=" + std::to_string(l.n) + " under 80% zeros");
      ++layers;
    }
  }
  c.Note("mnist" + zeros.str() + " random_layers=" + std::to_string(layers));
  return c;
}

}  // namespace
}  // namespace pvqnet

int main() {
  using namespace pvqnet;
  struct Criterion {
    const char* name;
    Check (*run)();
  };
  const Criterion criteria[] = {
      {"lattice count", LatticeCount},
      {"encoder optimality", EncoderOptimality},
      {"index bijection", IndexBijection},
      {"multiplication-free layers", MultiplicationFree},
      {"scale propagation", ScalePropagation},
      {"binary identities", BinaryIdentities},
      {"compression numbers", CompressionNumbers},
      {"cycle model", CycleModel},
      {"end-to-end accuracy", EndToEndAccuracy},
      {"sparsity", Sparsity},
  };
  int failed = 0;
  int number = 0;
  for (const Criterion& cr : criteria) {
    ++number;
    Check c;
    try {
      c = cr.run();
    } catch (const std::exception& e) {
      c.Expect(false, std::string("exception: ") + e.what());
    }
    failed += !c.ok();
    std::cout << "criterion " << number << " " << (c.ok() ? "PASS" : "FAIL") << " " << cr.name << ": "
              << c.Summary() << std::endl;
  }
  return failed ? EXIT_FAILURE : EXIT_SUCCESS;
}
