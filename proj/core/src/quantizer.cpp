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

#include "pvqnet/quantizer.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <sstream>
#include <thread>

#include "pvqnet/error.hpp"
#include "pvqnet/inference.hpp"

namespace pvqnet {

namespace {

std::uint64_t ParseUnsigned(std::string_view s, std::string_view what) {
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    Fail(ErrorKind::kShape, "invalid " + std::string(what) + ": '" + std::string(s) + "'");
  }
  return v;
}

std::vector<std::string_view> SplitWords(std::string_view line) {
  std::vector<std::string_view> words;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) words.push_back(line.substr(i, j - i));
    i = j;
  }
  return words;
}

}  // namespace

Ratio Ratio::Parse(std::string_view text) {
  Ratio r;
  const std::size_t slash = text.find('/');
  if (slash == std::string_view::npos) {
    r.num = ParseUnsigned(text, "ratio");
    r.den = 1;
  } else {
    r.num = ParseUnsigned(text.substr(0, slash), "ratio numerator");
    r.den = ParseUnsigned(text.substr(slash + 1), "ratio denominator");
  }
  if (r.num == 0 || r.den == 0) Fail(ErrorKind::kShape, "ratio must be positive: " + std::string(text));
  const std::uint64_t g = std::gcd(r.num, r.den);
  r.num /= g;
  r.den /= g;
  return r;
}

std::string Ratio::ToString() const {
  return den == 1 ? std::to_string(num) : std::to_string(num) + "/" + std::to_string(den);
}

std::int64_t Ratio::PulsesFor(std::size_t n) const {
  using boost::multiprecision::uint128_t;
  const uint128_t k = uint128_t(n) * den / num;
  if (k > uint128_t(kMaxPulses)) {
    Fail(ErrorKind::kShape, "ratio " + ToString() + " gives more than 2^31 pulses");
  }
  return k == 0 ? 1 : static_cast<std::int64_t>(k);
}

std::string_view to_string(BiasMode m) {
  return m == BiasMode::kInteger ? "integer" : "joint";
}

std::optional<BiasMode> parse_bias_mode(std::string_view s) {
  if (s == "joint") return BiasMode::kJoint;
  if (s == "integer") return BiasMode::kInteger;
  return std::nullopt;
}

QuantConfig QuantConfig::Parse(std::string_view text) {
  QuantConfig cfg;
  std::size_t line_no = 0;
  while (!text.empty()) {
    const std::size_t eol = text.find('\n');
    std::string_view line = text.substr(0, eol);
    text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
    ++line_no;
    if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) {
      line = line.substr(0, hash);
    }
    const auto w = SplitWords(line);
    if (w.empty()) continue;
    auto bad = [&]() {
      Fail(ErrorKind::kShape, "config line " + std::to_string(line_no) + ": expected '<layer> ratio <N/K>', "
                              "'<layer> k <K>', 'default <fc|conv> ratio <N/K>' or "
                              "'bias <joint|integer>'");
    };
    if (w[0] == "bias") {
      if (w.size() != 2) bad();
      const auto mode = parse_bias_mode(w[1]);
      if (!mode) bad();
      cfg.bias_mode = *mode;
      continue;
    }
    if (w[0] == "default") {
      if (w.size() != 4 || w[2] != "ratio") bad();
      const Ratio r = Ratio::Parse(w[3]);
      if (w[1] == "fc") {
        cfg.default_fc = r;
      } else if (w[1] == "conv") {
        cfg.default_conv = r;
      } else {
        bad();
      }
      continue;
    }
    if (w.size() != 3) bad();
    LayerQuantSpec spec;
    if (w[1] == "ratio") {
      spec.ratio = Ratio::Parse(w[2]);
    } else if (w[1] == "k") {
      const std::uint64_t k = ParseUnsigned(w[2], "k");
      if (k < 1 || k > static_cast<std::uint64_t>(kMaxPulses)) {
        Fail(ErrorKind::kShape, "config line " + std::to_string(line_no) + ": k out of range");
      }
      spec.k = static_cast<std::int64_t>(k);
    } else {
      bad();
    }
    cfg.layers[std::string(w[0])] = spec;
  }
  return cfg;
}

QuantConfig QuantConfig::Preset(std::string_view name) {
  if (name == "mnist-a") return Parse("FC0 ratio 5\nFC1 ratio 5\nFC2 ratio 5\n");
  if (name == "cifar10-b") {
    return Parse(
        "CONV0 ratio 1/3\nCONV1 ratio 1\nCONV2 ratio 1\nCONV3 ratio 1\nFC4 ratio 4\nFC5 ratio 1\n");
  }
  if (name == "mnist-c-binary") return Parse("FC0 ratio 5/2\nFC1 ratio 5\nFC2 ratio 4\n");
  if (name == "cifar10-d-binary") {
    return Parse(
        "CONV0 ratio 2/5\nCONV1 ratio 1\nCONV2 ratio 3/2\nCONV3 ratio 2\nFC4 ratio 5\nFC5 ratio 1\n");
  }
  Fail(ErrorKind::kShape, "unknown preset '" + std::string(name) + "'");
}

std::vector<std::string> QuantConfig::PresetNames() {
  return {"mnist-a", "cifar10-b", "mnist-c-binary", "cifar10-d-binary"};
}

Layer quantize_layer(const Layer& layer, std::int64_t k, double bias_scale) {
  if (!layer.has_params() || !layer.is_float()) {
    Fail(ErrorKind::kShape, "quantize_layer: layer " + layer.name + " has no float parameters");
  }
  if (k < 1) Fail(ErrorKind::kInvalidArgument, "quantize_layer: k must be >= 1");
  if (!(bias_scale > 0.0) || !std::isfinite(bias_scale)) {
    Fail(ErrorKind::kInvalidArgument, "quantize_layer: bias scale must be positive and finite");
  }
  const FloatParams& f = layer.float_params();
  const std::size_t nw = f.weights.size();
  std::vector<double> flat(nw + f.biases.size());
  std::copy(f.weights.values().begin(), f.weights.values().end(), flat.begin());
  for (std::size_t i = 0; i < f.biases.size(); ++i) flat[nw + i] = f.biases[i] / bias_scale;

  QuantizedVector qv = encode(flat, k);
  const auto coords = qv.point.coords();
  QuantizedParams q;
  q.weights = IntTensor(f.weights.shape(), std::vector<std::int64_t>(coords.begin(), coords.begin() + nw));
  q.biases.assign(coords.begin() + nw, coords.end());
  q.rho = qv.rho;
  q.k = k;
  q.bias_scale = bias_scale;

  Layer out = layer;
  out.params = std::move(q);
  return out;
}

QuantizeResult quantize_network(const Network& net, const QuantConfig& cfg) {
  net.Validate();
  for (const auto& [name, spec] : cfg.layers) {
    const Layer* l = net.find(name);
    if (l == nullptr) Fail(ErrorKind::kShape, "config references missing layer '" + name + "'");
    if (!l->has_params()) Fail(ErrorKind::kShape, "config layer '" + name + "' has no weights");
  }

  QuantizeResult result;
  result.network = net;
  double scale = 1.0;
  for (std::size_t i = 0; i < result.network.layers.size(); ++i) {
    Layer& l = result.network.layers[i];
    if (!l.has_params()) continue;
    std::optional<std::int64_t> k;
    if (auto it = cfg.layers.find(l.name); it != cfg.layers.end()) {
      k = it->second.k ? *it->second.k : it->second.ratio->PulsesFor(l.parameter_count());
    } else if (l.kind == LayerKind::kFullyConnected && cfg.default_fc) {
      k = cfg.default_fc->PulsesFor(l.parameter_count());
    } else if (l.kind == LayerKind::kConv2d && cfg.default_conv) {
      k = cfg.default_conv->PulsesFor(l.parameter_count());
    }
    if (!k || !l.is_float()) {
      if (l.is_quantized()) {
        const QuantizedParams& q = l.quantized_params();
        scale *= q.rho * std::ldexp(1.0, static_cast<int>(l.shift));
      } else {
        scale = 1.0;
      }
      if (l.activation == Activation::kBsign) scale = 1.0;
      continue;
    }
    l = quantize_layer(l, *k, cfg.bias_mode == BiasMode::kInteger ? scale : 1.0);
    const QuantizedParams& q = l.quantized_params();
    const PvqPoint point = q.point();
    result.report.push_back(LayerReport{i, l.name, l.kind, q.dimension(), q.k, q.rho, point.nnz(),
                                        q.bias_scale, histogram_of(l.name, point.coords())});
    scale *= q.rho * std::ldexp(1.0, static_cast<int>(l.shift));
    if (l.activation == Activation::kBsign) scale = 1.0;
  }
  return result;
}

std::size_t WeightHistogram::BucketOf(std::int64_t v) {
  const std::uint64_t a = static_cast<std::uint64_t>(v < 0 ? -v : v);
  if (a == 0) return 0;
  if (a == 1) return 1;
  if (a <= 3) return 2;
  if (a <= 7) return 3;
  return 4;
}

double WeightHistogram::percent(std::size_t bucket) const {
  return total == 0 ? 0.0 : 100.0 * static_cast<double>(buckets[bucket]) / static_cast<double>(total);
}

WeightHistogram histogram_of(std::string layer, std::span<const std::int64_t> coords) {
  WeightHistogram h;
  h.layer = std::move(layer);
  for (std::int64_t v : coords) ++h.buckets[WeightHistogram::BucketOf(v)];
  h.total = coords.size();
  return h;
}

std::vector<WeightHistogram> weight_stats(const Network& net) {
  std::vector<WeightHistogram> out;
  for (const Layer& l : net.layers) {
    if (!l.is_quantized()) continue;
    const PvqPoint p = l.quantized_params().point();
    out.push_back(histogram_of(l.name, p.coords()));
  }
  if (out.empty()) Fail(ErrorKind::kShape, "weight_stats: network has no quantized layers");
  return out;
}

namespace {

std::string Grouped(std::uint64_t v) {
  std::string digits = std::to_string(v);
  std::string out;
  for (std::size_t i = 0; i < digits.size(); ++i) {
    if (i != 0 && (digits.size() - i) % 3 == 0) out += ',';
    out += digits[i];
  }
  return out;
}

std::string Fixed(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

}  // namespace

void PrintHistogramTable(std::ostream& os, const std::vector<WeightHistogram>& stats) {
  os << std::left << std::setw(10) << "Layer" << std::right;
  for (const char* label : kBucketLabels) os << std::setw(12) << label;
  os << '\n';
  for (const WeightHistogram& h : stats) {
    os << std::left << std::setw(10) << h.layer << std::right;
    for (std::uint64_t c : h.buckets) os << std::setw(12) << Grouped(c);
    os << '\n' << std::setw(10) << "";
    for (std::size_t b = 0; b < h.buckets.size(); ++b) os << std::setw(12) << Fixed(h.percent(b), 2) + "%";
    os << '\n';
  }
}

void PrintQuantizeReport(std::ostream& os, const std::vector<LayerReport>& report) {
  for (const LayerReport& r : report) {
    char rho[32];
    std::snprintf(rho, sizeof rho, "%.9g", r.rho);
    os << "index=" << r.index << " layer=" << r.name << " kind=" << to_string(r.kind) << " N=" << r.n << " k=" << r.k
       << " N/k=" << Fixed(static_cast<double>(r.n) / static_cast<double>(r.k), 3) << " rho=" << rho
       << " nnz=" << r.nnz << " zero%=" << Fixed(100.0 * static_cast<double>(r.n - r.nnz) / static_cast<double>(r.n), 2);
    os << " hist%=";
    for (std::size_t b = 0; b < kBucketLabels.size(); ++b) {
      os << (b ? "," : "") << kBucketLabels[b] << ':' << Fixed(r.histogram.percent(b), 2);
    }
    os << '\n';
  }
}

IntTensor LabeledSamples::sample(std::size_t i) const {
  const std::size_t n = ShapeSize(sample_shape);
  std::vector<std::int64_t> v(pixels.begin() + static_cast<std::ptrdiff_t>(i * n),
                              pixels.begin() + static_cast<std::ptrdiff_t>((i + 1) * n));
  return IntTensor(sample_shape, std::move(v));
}

std::string_view to_string(InferencePath p) {
  switch (p) {
    case InferencePath::kFloat:
      return "float";
    case InferencePath::kPvq:
      return "pvq";
    case InferencePath::kBinary:
      return "binary";
  }
  return "unknown";
}

std::optional<InferencePath> parse_inference_path(std::string_view s) {
  for (InferencePath p : {InferencePath::kFloat, InferencePath::kPvq, InferencePath::kBinary}) {
    if (to_string(p) == s) return p;
  }
  return std::nullopt;
}

namespace {

struct Shard {
  std::size_t correct = 0;
  DotStats stats;
};

Shard EvaluateRange(const Network& net, const LabeledSamples& data, InferencePath path,
                    std::size_t begin, std::size_t end) {
  Shard s;
  const bool integer = path == InferencePath::kPvq && has_integer_biases(net);
  for (std::size_t i = begin; i < end; ++i) {
    const IntTensor x = data.sample(i);
    std::size_t predicted = 0;
    switch (path) {
      case InferencePath::kFloat: {
        RealTensor xr(x.shape());
        for (std::size_t j = 0; j < x.size(); ++j) xr[j] = static_cast<double>(x[j]);
        const RealTensor y = forward_float(net, xr, &s.stats);
        predicted = argmax(y.data());
        break;
      }
      case InferencePath::kPvq: {
        if (integer) {
          const auto y = forward_pvq(net, x);
          s.stats += y.stats;
          predicted = argmax(y.logits.data());
        } else {
          RealTensor xr(x.shape());
          for (std::size_t j = 0; j < x.size(); ++j) xr[j] = static_cast<double>(x[j]);
          const auto y = forward_pvq(net, xr);
          s.stats += y.stats;
          predicted = argmax(y.logits.data());
        }
        break;
      }
      case InferencePath::kBinary: {
        const auto y = forward_binary(net, x);
        s.stats += y.stats;
        predicted = argmax(y.output.data());
        break;
      }
    }
    if (predicted == data.labels[i]) ++s.correct;
  }
  return s;
}

}  // namespace

Evaluation evaluate(const Network& net, const LabeledSamples& data, InferencePath path,
                    unsigned threads) {
  if (data.size() == 0) Fail(ErrorKind::kShape, "evaluate: empty dataset");
  if (data.pixels.size() != data.size() * ShapeSize(data.sample_shape)) {
    Fail(ErrorKind::kShape, "evaluate: pixel buffer does not match sample count");
  }
  if (ShapeSize(data.sample_shape) != ShapeSize(net.input_shape())) {
    Fail(ErrorKind::kShape, "evaluate: samples are " + ShapeToString(data.sample_shape) +
                                ", network expects " + ShapeToString(net.input_shape()));
  }
  bool any_quantized = false, any_float = false;
  for (const Layer& l : net.layers) {
    any_quantized |= l.is_quantized();
    any_float |= l.is_float();
  }
  if (path != InferencePath::kFloat && (any_float || !any_quantized)) {
    Fail(ErrorKind::kShape, std::string(to_string(path)) + " path needs every parameterized layer quantized");
  }
  const Network dequantized = path == InferencePath::kFloat && any_quantized ? Dequantize(net) : Network{};
  const Network& model = path == InferencePath::kFloat && any_quantized ? dequantized : net;

  const std::size_t n = data.size();
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(threads, n));
  std::vector<Shard> shards(workers);
  if (workers == 1) {
    shards[0] = EvaluateRange(model, data, path, 0, n);
  } else {
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          shards[w] = EvaluateRange(model, data, path, n * w / workers, n * (w + 1) / workers);
        } catch (...) {
          errors[w] = std::current_exception();
        }
      });
    }
    for (auto& t : pool) t.join();
    for (auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }
  Evaluation ev;
  ev.samples = n;
  for (const Shard& s : shards) {
    ev.correct += s.correct;
    ev.stats += s.stats;
  }
  ev.accuracy = static_cast<double>(ev.correct) / static_cast<double>(n);
  return ev;
}

}  // namespace pvqnet
